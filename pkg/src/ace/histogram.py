"""Joint clique histograms per layer, their marginals, and log clique factors.

Counts are kept raw; smoothing is a query-time choice. With smoothing
constant alpha, the joint is p(i,j) = (c[i,j] + alpha) / (T + alpha*s*s) and
the marginals are the row/column sums of that smoothed joint, so a factorised
joint gives a factor near zero and no bin is ever empty. The input layer's
factor is log p(i,j) itself; deeper layers use
log p(i,j) - log p(i) - log p(j). All logs are natural.
"""

import numpy as np


class CliqueHistogram:
    """side x side joint count table for one layer's clique pairs."""

    __slots__ = ("counts", "drop_bits", "layer_index", "is_input_layer")

    def __init__(self, counts, drop_bits: int, layer_index: int, is_input_layer: bool):
        arr = np.array(counts, dtype=np.int64, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("counts must be a square table")
        side = arr.shape[0]
        if side < 1 or (side & (side - 1)) != 0:
            raise ValueError("side must be a power of two")
        if arr.min(initial=0) < 0:
            raise ValueError("counts must be nonnegative")
        if drop_bits < 0:
            raise ValueError("drop_bits must be >= 0")
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)
        object.__setattr__(self, "drop_bits", int(drop_bits))
        object.__setattr__(self, "layer_index", int(layer_index))
        object.__setattr__(self, "is_input_layer", bool(is_input_layer))

    def __setattr__(self, name, value):
        raise AttributeError("CliqueHistogram is immutable")

    @property
    def side(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def smoothed_joint(self, alpha: float = 1.0) -> np.ndarray:
        if self.total == 0:
            raise RuntimeError("histogram empty")
        s = self.side
        return (self.counts + alpha) / (self.total + alpha * s * s)

    def log_factor_table(self, alpha: float = 1.0) -> np.ndarray:
        """Log clique factor for every (bin1, bin2) cell."""
        p = self.smoothed_joint(alpha)
        logp = np.log(p)
        if self.is_input_layer:
            return logp
        log_rows = np.log(p.sum(axis=1))
        log_cols = np.log(p.sum(axis=0))
        return logp - log_rows[:, None] - log_cols[None, :]

    def merged_with(self, other: "CliqueHistogram") -> "CliqueHistogram":
        """Combine partial counts accumulated separately (counts add)."""
        if (
            self.side != other.side
            or self.drop_bits != other.drop_bits
            or self.layer_index != other.layer_index
            or self.is_input_layer != other.is_input_layer
        ):
            raise ValueError("histograms describe different layers")
        return CliqueHistogram(
            self.counts + other.counts,
            self.drop_bits,
            self.layer_index,
            self.is_input_layer,
        )


def bin_of(value: int, drop_bits: int) -> int:
    """Histogram bin of a pixel code: the code with drop_bits low bits cut."""
    return int(value) >> drop_bits


def accumulate(pairs, value_bits: int, drop_bits: int, layer_index: int,
               is_input_layer: bool) -> CliqueHistogram:
    """Count clique pairs into a fresh histogram.

    pairs: (M, 2) array-like of codes below 2**value_bits; values are binned
    by dropping drop_bits low-order bits, one shared table for the layer.
    """
    if not 0 <= drop_bits <= value_bits:
        raise ValueError("need 0 <= drop_bits <= value_bits")
    side = 1 << (value_bits - drop_bits)
    arr = np.asarray(pairs, dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("pairs must be an (M, 2) sequence")
    if arr.size and (arr.min() < 0 or arr.max() >= 1 << value_bits):
        raise ValueError(f"pair value outside [0, 2**{value_bits})")
    b1 = arr[:, 0] >> drop_bits
    b2 = arr[:, 1] >> drop_bits
    counts = np.bincount(b1 * side + b2, minlength=side * side).reshape(side, side)
    return CliqueHistogram(counts, drop_bits, layer_index, is_input_layer)


def marginals(h: CliqueHistogram):
    """(row sums, column sums) of the raw count table."""
    return h.counts.sum(axis=1), h.counts.sum(axis=0)


def log_clique_factor(h: CliqueHistogram, v1: int, v2: int, alpha: float = 1.0) -> float:
    """Log clique factor (nats) for a pair of raw pixel codes.

    Smoothed joint over product of smoothed marginals, except in the input
    layer where the joint alone is the factor.
    """
    if h.total == 0:
        raise RuntimeError("histogram empty")
    i = bin_of(v1, h.drop_bits)
    j = bin_of(v2, h.drop_bits)
    s = h.side
    denom = h.total + alpha * s * s
    p_ij = (float(h.counts[i, j]) + alpha) / denom
    if h.is_input_layer:
        return float(np.log(p_ij))
    rows, cols = marginals(h)
    p_i = (float(rows[i]) + alpha * s) / denom
    p_j = (float(cols[j]) + alpha * s) / denom
    return float(np.log(p_ij) - np.log(p_i) - np.log(p_j))
