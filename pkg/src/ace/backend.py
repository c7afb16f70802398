"""Select the compiled kernel extension if it was built, else the numpy fallback."""

try:
    from ace import _kernels as _impl

    COMPILED = True
except ImportError:
    from ace import _kernels_py as _impl

    COMPILED = False

run_updates = _impl.run_updates
compile_winner_table = _impl.compile_winner_table


def backend_name() -> str:
    return "compiled" if COMPILED else "python"
