"""Exact brute-force top-k inner-product search.

Every source descriptor is scored against the full target grid (all-pairs,
no approximation). Ordering is descending by score with ties broken by
ascending row-major target index, which makes results reproducible and lets
the sparse and dense construction routes agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .grid import FeatureMap

# Cumulative count of pairwise inner products evaluated by searches. Lets
# callers assert that iterative refinement never re-correlates features.
_eval_count = 0


def correlation_eval_count() -> int:
    return _eval_count


def reset_correlation_eval_count() -> None:
    global _eval_count
    _eval_count = 0


def _add_evals(n: int) -> None:
    global _eval_count
    _eval_count += n


@dataclass(frozen=True)
class TopKMatches:
    """Per source pixel, the k best target positions and their scores.

    `indices` is (h, w, k, 2) int32 holding (row, col) into the target grid;
    `scores` is (h, w, k) float32, sorted descending per pixel. `target_shape`
    records the (h2, w2) grid the indices refer to.
    """

    indices: np.ndarray
    scores: np.ndarray
    target_shape: tuple[int, int]

    def __post_init__(self):
        idx = np.ascontiguousarray(self.indices, dtype=np.int32)
        sc = np.ascontiguousarray(self.scores, dtype=np.float32)
        if idx.ndim != 4 or idx.shape[3] != 2:
            raise ValueError(f"indices must be (h, w, k, 2), got {idx.shape}")
        if sc.shape != idx.shape[:3]:
            raise ValueError(f"scores shape {sc.shape} does not match indices {idx.shape[:3]}")
        h2, w2 = self.target_shape
        if idx.size:
            rows = idx[..., 0]
            cols = idx[..., 1]
            if rows.min() < 0 or rows.max() >= h2 or cols.min() < 0 or cols.max() >= w2:
                raise ValueError("match index outside the target grid")
        if not np.isfinite(sc).all():
            raise ValueError("match scores contain non-finite values")
        if sc.shape[2] > 1 and not (sc[:, :, :-1] >= sc[:, :, 1:]).all():
            raise ValueError("match scores must be sorted descending per pixel")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "scores", sc)

    @property
    def height(self) -> int:
        return self.indices.shape[0]

    @property
    def width(self) -> int:
        return self.indices.shape[1]

    @property
    def k(self) -> int:
        return self.indices.shape[2]


def topk_select(scores, k: int) -> np.ndarray:
    """Indices of the k largest values, descending, ties by ascending index."""
    s = np.asarray(scores)
    if s.ndim != 1:
        raise ValueError(f"scores must be 1-D, got shape {s.shape}")
    if not 0 <= k <= s.shape[0]:
        raise ValueError(f"k={k} out of range for {s.shape[0]} scores")
    order = np.argsort(-s, kind="stable")
    return order[:k]


def topk_search(
    f1: FeatureMap,
    f2: FeatureMap,
    k: int = 8,
    scale: float = 1.0,
    backend_name: str | None = None,
) -> TopKMatches:
    """Exact top-k correlation search of every F1 descriptor into all of F2.

    Scores are raw inner products (optionally multiplied by `scale`),
    accumulated in float64 and stored as float32.
    """
    if f1.channels != f2.channels:
        raise ValueError(f"channel counts differ: {f1.channels} vs {f2.channels}")
    n = f2.height * f2.width
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range [1, {n}]")
    if not np.isfinite(scale) or scale <= 0:
        raise ValueError(f"scale must be positive and finite, got {scale}")

    flat1 = f1.data.reshape(-1, f1.channels)
    flat2 = f2.data.reshape(-1, f2.channels)
    kern = backend.kernels(backend_name)
    lin, scores = kern.topk_correlate(flat1, flat2, k, float(scale))
    _add_evals(flat1.shape[0] * n)

    rows = (lin // f2.width).astype(np.int32)
    cols = (lin % f2.width).astype(np.int32)
    indices = np.stack([rows, cols], axis=-1).reshape(f1.height, f1.width, k, 2)
    return TopKMatches(
        indices=indices,
        scores=scores.reshape(f1.height, f1.width, k),
        target_shape=(f2.height, f2.width),
    )
