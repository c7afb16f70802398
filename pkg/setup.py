from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the numpy
# implementations in ace._kernels_py when the extension is unavailable.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "ace._kernels",
                ["src/ace/_kernels.pyx"],
                # -ffp-contract=off: no FMA contraction, so the compiled
                # kernels match the numpy fallback bit for bit.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
