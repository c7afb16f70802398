"""1-D topographic mappings over 2-D inputs and their compiled look-up tables.

The production trainer (train_modified) grows the codebook in a binary
sequence N = 2, 4, 8, ... up to a power-of-two target, running a fixed
number of competitive updates per generation and seeding each new generation
by interpolating the previous one. The neighbourhood function is fixed: the
winner moves by eps, its two chain neighbours by eps_prime, nothing else
moves, and the chain does not wrap. The classic shrinking-neighbourhood
trainer (train_standard) is kept only as a comparison baseline.

Training is sequential by contract (updates are order dependent) and fully
deterministic given (samples order, seed). winner and compile_lut are pure
and safe to call concurrently on a frozen map.
"""

from dataclasses import dataclass

import numpy as np

from ace import backend
from ace._rng import SplitMix64


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


class TopoMap:
    """Ordered codebook of 2-D reference vectors; index = output code.

    refvecs: (N, 2) float64, read-only; N is a power of two, at least 2.
    """

    __slots__ = ("refvecs",)

    def __init__(self, refvecs):
        arr = np.array(refvecs, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("refvecs must be an (N, 2) array")
        if not _is_pow2(arr.shape[0]) or arr.shape[0] < 2:
            raise ValueError(f"N must be a power of two >= 2, got {arr.shape[0]}")
        arr.setflags(write=False)
        object.__setattr__(self, "refvecs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("TopoMap is immutable")

    @property
    def n_refvecs(self) -> int:
        return self.refvecs.shape[0]


@dataclass(frozen=True)
class TrainConfig:
    """Constants for the growing-codebook trainer.

    Defaults eps=0.1, eps_prime=0.05 and 20 updates per vector per
    generation are the stock values; final_size is the target codebook
    size 2**B.
    """

    final_size: int
    seed: int = 0
    eps: float = 0.1
    eps_prime: float = 0.05
    updates_per_generation_factor: int = 20

    def __post_init__(self):
        if not _is_pow2(self.final_size) or self.final_size < 2:
            raise ValueError("final_size must be a power of two >= 2")
        if not 0.0 < self.eps_prime <= self.eps < 1.0:
            raise ValueError("need 0 < eps_prime <= eps < 1")
        if self.updates_per_generation_factor < 1:
            raise ValueError("updates_per_generation_factor must be >= 1")


class Lut:
    """Compiled pair-to-code table for one layer transform.

    table is flat, length 2**(2*input_bits), entry (v1, v2) at index
    v1 * 2**input_bits + v2; every entry is below 2**output_bits.
    """

    __slots__ = ("input_bits", "output_bits", "table")

    def __init__(self, input_bits: int, output_bits: int, table):
        arr = np.array(table, dtype=np.uint16, copy=True)
        if arr.ndim != 1 or arr.shape[0] != 1 << (2 * input_bits):
            raise ValueError("table length must be 2**(2*input_bits)")
        if arr.max(initial=0) >= 1 << output_bits:
            raise ValueError("table entry exceeds output code range")
        arr.setflags(write=False)
        object.__setattr__(self, "input_bits", int(input_bits))
        object.__setattr__(self, "output_bits", int(output_bits))
        object.__setattr__(self, "table", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Lut is immutable")

    @property
    def table2d(self) -> np.ndarray:
        side = 1 << self.input_bits
        return self.table.reshape(side, side)


def winner(topo: TopoMap, x) -> int:
    """Index of the nearest reference vector (squared Euclidean distance);
    ties break to the lowest index."""
    x0, x1 = float(x[0]), float(x[1])
    d = np.square(topo.refvecs[:, 0] - x0) + np.square(topo.refvecs[:, 1] - x1)
    return int(np.argmin(d))


def update_step(topo: TopoMap, x, winner_index: int, cfg: TrainConfig) -> TopoMap:
    """One competitive update: winner moves by eps toward x, chain
    neighbours by eps_prime; the chain does not wrap. Pure."""
    new = topo.refvecs.copy()
    x0, x1 = float(x[0]), float(x[1])
    n = new.shape[0]
    w = int(winner_index)
    new[w, 0] += cfg.eps * (x0 - new[w, 0])
    new[w, 1] += cfg.eps * (x1 - new[w, 1])
    if w > 0:
        new[w - 1, 0] += cfg.eps_prime * (x0 - new[w - 1, 0])
        new[w - 1, 1] += cfg.eps_prime * (x1 - new[w - 1, 1])
    if w < n - 1:
        new[w + 1, 0] += cfg.eps_prime * (x0 - new[w + 1, 0])
        new[w + 1, 1] += cfg.eps_prime * (x1 - new[w + 1, 1])
    return TopoMap(new)


def interpolate_generation(refvecs) -> np.ndarray:
    """Double a codebook: keep each vector, insert midpoints between
    neighbours, duplicate the final vector to stay inside the data range."""
    old = np.asarray(refvecs, dtype=np.float64)
    n = old.shape[0]
    if not _is_pow2(n) or n < 2:
        raise ValueError(f"codebook size must be a power of two >= 2, got {n}")
    new = np.empty((2 * n, 2), dtype=np.float64)
    new[0::2] = old
    new[1:-1:2] = (old[:-1] + old[1:]) / 2.0
    new[-1] = old[-1]
    return new


def train_modified(samples, cfg: TrainConfig) -> TopoMap:
    """Growing-codebook training.

    Starts from two vectors drawn from the training set, then alternates
    factor*N updates with codebook doubling until final_size vectors have
    had their updates. Every random draw comes from one splitmix64 stream,
    so identical (samples, cfg) give a bitwise identical map on both
    kernel backends.
    """
    xs = np.ascontiguousarray(np.asarray(samples, dtype=np.float64))
    if xs.ndim != 2 or xs.shape[1] != 2:
        raise ValueError("samples must be an (M, 2) array of pairs")
    m = xs.shape[0]
    if m == 0:
        raise ValueError("samples must be nonempty")
    rng = SplitMix64(cfg.seed)
    refvecs = xs[rng.indices(2, m)].copy()
    n = 2
    while True:
        idx = rng.indices(cfg.updates_per_generation_factor * n, m)
        backend.run_updates(refvecs, xs, idx, cfg.eps, cfg.eps_prime)
        if n == cfg.final_size:
            break
        refvecs = interpolate_generation(refvecs)
        n *= 2
    return TopoMap(refvecs)


def train_standard(samples, n_refvecs: int, schedule, seed: int = 0) -> TopoMap:
    """Classic fixed-size training with a shrinking boxcar neighbourhood.

    schedule: sequence of (width, eps, n_updates) phases; widths and eps
    must be nonincreasing. Within a phase every vector at chain distance
    <= width from the winner moves by eps toward the sample. Comparison
    baseline only.
    """
    xs = np.asarray(samples, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != 2:
        raise ValueError("samples must be an (M, 2) array of pairs")
    m = xs.shape[0]
    if m == 0:
        raise ValueError("samples must be nonempty")
    phases = [(int(wd), float(ep), int(k)) for wd, ep, k in schedule]
    if not phases:
        raise ValueError("schedule must be nonempty")
    widths = [p[0] for p in phases]
    epss = [p[1] for p in phases]
    if widths != sorted(widths, reverse=True) or epss != sorted(epss, reverse=True):
        raise ValueError("schedule widths and eps values must be nonincreasing")
    rng = SplitMix64(seed)
    refvecs = xs[rng.indices(n_refvecs, m)].copy()
    r0 = refvecs[:, 0]
    r1 = refvecs[:, 1]
    for width, eps, n_updates in phases:
        for t in rng.indices(n_updates, m):
            x0 = xs[t, 0]
            x1 = xs[t, 1]
            w = int(np.argmin(np.square(r0 - x0) + np.square(r1 - x1)))
            lo = max(0, w - width)
            hi = min(n_refvecs, w + width + 1)
            refvecs[lo:hi, 0] += eps * (x0 - refvecs[lo:hi, 0])
            refvecs[lo:hi, 1] += eps * (x1 - refvecs[lo:hi, 1])
    return TopoMap(refvecs)


def compile_lut(topo: TopoMap, input_bits: int) -> Lut:
    """Tabulate winner() over the full (v1, v2) integer grid."""
    if not 1 <= input_bits <= 8:
        raise ValueError("input_bits must be in [1, 8]")
    table = backend.compile_winner_table(topo.refvecs, input_bits)
    output_bits = int(topo.n_refvecs).bit_length() - 1
    return Lut(input_bits, output_bits, table)


def distortion(topo: TopoMap, samples) -> float:
    """Mean squared distance from each sample to its winning vector."""
    xs = np.asarray(samples, dtype=np.float64)
    d = np.square(xs[:, None, 0] - topo.refvecs[None, :, 0]) + np.square(
        xs[:, None, 1] - topo.refvecs[None, :, 1]
    )
    return float(np.mean(np.min(d, axis=1)))
