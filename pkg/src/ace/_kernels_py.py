"""numpy fallback for the compiled kernels in ace._kernels.

Both implementations must agree bit for bit: distances are accumulated as
(ref - x)**2 per component in the same order, ties resolve to the lowest
index, and updates are plain float64 multiply-adds (the extension is built
with FMA contraction disabled for this reason).
"""

import numpy as np


def run_updates(refvecs, samples, idx, eps, eps_prime):
    """Sequential competitive updates on a 1-D chain of 2-D reference vectors.

    refvecs (n, 2) float64 is modified in place. For each sample index in
    idx the nearest vector moves by eps toward the sample and its chain
    neighbours (no wraparound) move by eps_prime.
    """
    r0 = refvecs[:, 0]
    r1 = refvecs[:, 1]
    n = refvecs.shape[0]
    for t in idx:
        x0 = samples[t, 0]
        x1 = samples[t, 1]
        d = np.square(r0 - x0) + np.square(r1 - x1)
        w = int(np.argmin(d))
        refvecs[w, 0] += eps * (x0 - refvecs[w, 0])
        refvecs[w, 1] += eps * (x1 - refvecs[w, 1])
        if w > 0:
            refvecs[w - 1, 0] += eps_prime * (x0 - refvecs[w - 1, 0])
            refvecs[w - 1, 1] += eps_prime * (x1 - refvecs[w - 1, 1])
        if w < n - 1:
            refvecs[w + 1, 0] += eps_prime * (x0 - refvecs[w + 1, 0])
            refvecs[w + 1, 1] += eps_prime * (x1 - refvecs[w + 1, 1])


def compile_winner_table(refvecs, input_bits):
    """Nearest reference vector for every (v1, v2) grid point.

    Returns a flat uint16 array of length 2**(2 * input_bits), indexed by
    v1 * 2**input_bits + v2.
    """
    side = 1 << input_bits
    n = refvecs.shape[0]
    vals = np.arange(side, dtype=np.float64)
    p0 = np.repeat(vals, side)
    p1 = np.tile(vals, side)
    out = np.empty(side * side, dtype=np.uint16)
    # Block the broadcast so the (points, n) distance matrix stays small.
    block = max(1, (1 << 22) // n)
    for s in range(0, side * side, block):
        e = min(side * side, s + block)
        d = np.square(refvecs[None, :, 0] - p0[s:e, None]) + np.square(
            refvecs[None, :, 1] - p1[s:e, None]
        )
        out[s:e] = np.argmin(d, axis=1).astype(np.uint16)
    return out
