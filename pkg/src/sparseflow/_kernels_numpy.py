"""Pure-numpy kernels: the fallback path behind `backend.kernels`.

Contract shared with `_kernels_numba`:

* Correlation scores are accumulated in float64 and rounded to float32
  before anything is selected or stored, so the sparse constructor and the
  dense oracle see bit-identical values.
* Top-k ordering is descending by float32 score, ties broken by ascending
  row-major target index (stable argsort implements exactly that rule).
* The motion-tensor accumulator runs in float64; the caller casts to
  float32 once at the end.
"""

from __future__ import annotations

import numpy as np


def dense_correlate(f1: np.ndarray, f2: np.ndarray, scale: float) -> np.ndarray:
    """All-pairs inner products, (P, n) float32 from (P, c) and (n, c)."""
    scores = f1.astype(np.float64) @ f2.astype(np.float64).T
    scores *= scale
    return scores.astype(np.float32)


def topk_correlate(
    f1: np.ndarray, f2: np.ndarray, k: int, scale: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per source descriptor, the k best target indices and their scores.

    Returns (P, k) int64 linear target indices and (P, k) float32 scores,
    sorted descending with index-ascending tie breaks.
    """
    scores = dense_correlate(f1, f2, scale)
    order = np.argsort(-scores, axis=1, kind="stable")[:, :k]
    values = np.take_along_axis(scores, order, axis=1)
    return order.astype(np.int64), values


def select_topk_rows(values: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise top-k of a (P, n) float32 matrix under the shared tie rule."""
    order = np.argsort(-values, axis=1, kind="stable")[:, :k]
    return order.astype(np.int64), np.take_along_axis(values, order, axis=1)


def encode_accumulate(
    disp: np.ndarray, values: np.ndarray, levels: int, radius: int
) -> np.ndarray:
    """Scale, window, and bilinearly splat volume entries into channel grids.

    disp is (P, k, 2) float32 [dx, dy]; values is (P, k) float32. Returns a
    (P, levels * (2*radius+1)**2) float64 accumulator. An entry at level l
    is kept when its coordinates divided by 2**(l-1) have L-inf norm <= r;
    kept entries distribute value * (1-|fx|)(1-|fy|) to their (at most four)
    integer neighbors, all of which land inside the window grid.
    """
    p_count, k = values.shape
    win = 2 * radius + 1
    win2 = win * win
    out = np.zeros((p_count, levels * win2), dtype=np.float64)
    if k == 0:
        return out
    pix = np.repeat(np.arange(p_count, dtype=np.int64), k)
    d = disp.reshape(-1, 2).astype(np.float64)
    v = values.reshape(-1).astype(np.float64)
    for lvl in range(levels):
        s = d / float(2 ** lvl)
        keep = (np.abs(s[:, 0]) <= radius) & (np.abs(s[:, 1]) <= radius)
        if not keep.any():
            continue
        sx = s[keep, 0]
        sy = s[keep, 1]
        vv = v[keep]
        pp = pix[keep]
        x0 = np.floor(sx)
        y0 = np.floor(sy)
        fx = sx - x0
        fy = sy - y0
        base = lvl * win2
        cell = base + (y0.astype(np.int64) + radius) * win + (x0.astype(np.int64) + radius)
        if cell.min(initial=base) < base or cell.max(initial=base) >= base + win2:
            raise AssertionError("splat index escaped the window grid")
        np.add.at(out, (pp, cell), (1.0 - fx) * (1.0 - fy) * vv)
        m = fx > 0.0
        if m.any():
            np.add.at(out, (pp[m], cell[m] + 1), (fx * (1.0 - fy) * vv)[m])
        m = fy > 0.0
        if m.any():
            np.add.at(out, (pp[m], cell[m] + win), ((1.0 - fx) * fy * vv)[m])
        m = (fx > 0.0) & (fy > 0.0)
        if m.any():
            np.add.at(out, (pp[m], cell[m] + win + 1), (fx * fy * vv)[m])
    return out
