"""Compiled hot kernels: sequential codebook updates and winner-table compilation.

Must stay bit-for-bit compatible with ace._kernels_py (same operation order,
first-minimum tie break, no FMA contraction; see setup.py).
"""

import numpy as np


def run_updates(double[:, ::1] refvecs, const double[:, ::1] samples,
                const long long[::1] idx, double eps, double eps_prime):
    cdef Py_ssize_t n = refvecs.shape[0]
    cdef Py_ssize_t m = idx.shape[0]
    cdef Py_ssize_t t, j, w
    cdef double x0, x1, d0, d1, d, best
    for t in range(m):
        x0 = samples[idx[t], 0]
        x1 = samples[idx[t], 1]
        d0 = refvecs[0, 0] - x0
        d1 = refvecs[0, 1] - x1
        best = d0 * d0 + d1 * d1
        w = 0
        for j in range(1, n):
            d0 = refvecs[j, 0] - x0
            d1 = refvecs[j, 1] - x1
            d = d0 * d0 + d1 * d1
            if d < best:
                best = d
                w = j
        refvecs[w, 0] += eps * (x0 - refvecs[w, 0])
        refvecs[w, 1] += eps * (x1 - refvecs[w, 1])
        if w > 0:
            refvecs[w - 1, 0] += eps_prime * (x0 - refvecs[w - 1, 0])
            refvecs[w - 1, 1] += eps_prime * (x1 - refvecs[w - 1, 1])
        if w < n - 1:
            refvecs[w + 1, 0] += eps_prime * (x0 - refvecs[w + 1, 0])
            refvecs[w + 1, 1] += eps_prime * (x1 - refvecs[w + 1, 1])


def compile_winner_table(const double[:, ::1] refvecs, int input_bits):
    cdef Py_ssize_t side = 1 << input_bits
    cdef Py_ssize_t n = refvecs.shape[0]
    out_arr = np.empty(side * side, dtype=np.uint16)
    cdef unsigned short[::1] out = out_arr
    cdef Py_ssize_t v1, v2, j, w
    cdef double x0, x1, d0, d1, d, best
    for v1 in range(side):
        x0 = <double> v1
        for v2 in range(side):
            x1 = <double> v2
            d0 = refvecs[0, 0] - x0
            d1 = refvecs[0, 1] - x1
            best = d0 * d0 + d1 * d1
            w = 0
            for j in range(1, n):
                d0 = refvecs[j, 0] - x0
                d1 = refvecs[j, 1] - x1
                d = d0 * d0 + d1 * d1
                if d < best:
                    best = d
                    w = j
            out[v1 * side + v2] = <unsigned short> w
    return out_arr
