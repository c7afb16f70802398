"""Brute-force reference implementations used by the test suite.

Everything here is deliberately written from scratch, without reusing the
main modules, so that agreement between the two code paths is evidence
rather than tautology. Scales only to test-sized alphabets.
"""

import numpy as np

from ace._rng import SplitMix64


class TinyTree:
    """Explicit two-level tree over four input symbols.

    map1 and map2 are (in_size, in_size) integer tables sending the input
    pairs (x1, x2) and (x3, x4) to output codes. p_in12, p_in34 and p_out
    are strictly positive probability tables, each normalised within 1e-12.
    """

    def __init__(self, map1, map2, p_in12, p_in34, p_out):
        self.map1 = np.asarray(map1, dtype=np.int64)
        self.map2 = np.asarray(map2, dtype=np.int64)
        self.p_in12 = np.asarray(p_in12, dtype=np.float64)
        self.p_in34 = np.asarray(p_in34, dtype=np.float64)
        self.p_out = np.asarray(p_out, dtype=np.float64)
        if self.map1.shape != self.map2.shape or self.map1.ndim != 2:
            raise ValueError("map tables must be equal-shaped 2-D tables")
        for name, table in (("p_in12", self.p_in12), ("p_in34", self.p_in34),
                            ("p_out", self.p_out)):
            if table.min() <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
            if abs(float(table.sum()) - 1.0) > 1e-12:
                raise ValueError(f"{name} must be normalised within 1e-12")

    @property
    def in_size(self) -> int:
        return self.map1.shape[0]


def q_eq1(t: TinyTree, x) -> float:
    """Output joint converted to input space by dividing each branch's
    compression factor out."""
    x1, x2, x3, x4 = x
    y1 = int(t.map1[x1, x2])
    y2 = int(t.map2[x3, x4])
    p_out_y1 = float(t.p_out.sum(axis=1)[y1])
    p_out_y2 = float(t.p_out.sum(axis=0)[y2])
    return (
        float(t.p_out[y1, y2])
        * (float(t.p_in12[x1, x2]) / p_out_y1)
        * (float(t.p_in34[x3, x4]) / p_out_y2)
    )


def q_eq2(t: TinyTree, x) -> float:
    """Product of the input joints, corrected by the output correlation
    ratio. Algebraically the same quantity as q_eq1."""
    x1, x2, x3, x4 = x
    y1 = int(t.map1[x1, x2])
    y2 = int(t.map2[x3, x4])
    marg1 = float(t.p_out.sum(axis=1)[y1])
    marg2 = float(t.p_out.sum(axis=0)[y2])
    correction = float(t.p_out[y1, y2]) / (marg1 * marg2)
    return float(t.p_in12[x1, x2]) * float(t.p_in34[x3, x4]) * correction


def brute_histogram(samples, map1, map2, out_size: int, alpha: float = 1.0) -> TinyTree:
    """Count the three pair tables of a sample list, smooth with alpha, and
    package them as a TinyTree. Plain loops on purpose."""
    map1 = np.asarray(map1, dtype=np.int64)
    map2 = np.asarray(map2, dtype=np.int64)
    in_size = map1.shape[0]
    c12 = np.zeros((in_size, in_size), dtype=np.int64)
    c34 = np.zeros((in_size, in_size), dtype=np.int64)
    c_out = np.zeros((out_size, out_size), dtype=np.int64)
    n = 0
    for x1, x2, x3, x4 in samples:
        c12[x1, x2] += 1
        c34[x3, x4] += 1
        c_out[map1[x1, x2], map2[x3, x4]] += 1
        n += 1
    if n == 0:
        raise ValueError("samples must be nonempty")

    def smooth(c):
        cells = c.shape[0] * c.shape[1]
        return (c + alpha) / (n + alpha * cells)

    return TinyTree(map1, map2, smooth(c12), smooth(c34), smooth(c_out))


def kmeans_distortion(samples, k: int, seed: int = 0, max_iter: int = 100) -> float:
    """Mean squared distance after Lloyd's iterations to convergence.

    Init is deterministic greedy farthest-point: the seed picks the first
    centre, each next centre is the sample farthest from all chosen ones
    (ties to the lowest index). Empty clusters keep their old centre.
    """
    xs = np.asarray(samples, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[0] < k:
        raise ValueError("need at least k samples of equal dimension")
    rng = SplitMix64(seed)
    first = int(rng.indices(1, xs.shape[0])[0])
    centres = [xs[first]]
    dmin = np.sum((xs - centres[0]) ** 2, axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(dmin))
        centres.append(xs[nxt])
        dmin = np.minimum(dmin, np.sum((xs - centres[-1]) ** 2, axis=1))
    centres = np.array(centres)
    assign = None
    for _ in range(max_iter):
        d = np.sum((xs[:, None, :] - centres[None, :, :]) ** 2, axis=2)
        new_assign = np.argmin(d, axis=1)
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(k):
            members = xs[assign == j]
            if len(members):
                centres[j] = members.mean(axis=0)
    d = np.sum((xs[:, None, :] - centres[None, :, :]) ** 2, axis=2)
    return float(np.mean(np.min(d, axis=1)))
