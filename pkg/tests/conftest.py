"""Shared test helpers: synthetic maps, images, and reference oracles."""

from __future__ import annotations

import numpy as np
import pytest

from sparseflow import FeatureMap, FlowField


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_feature_map(rng, h, w, c, scale=1.0) -> FeatureMap:
    return FeatureMap((scale * rng.standard_normal((h, w, c))).astype(np.float32))


def orthonormal_feature_map(h, w) -> FeatureMap:
    """Every pixel gets a distinct one-hot descriptor, c = h * w."""
    data = np.eye(h * w, dtype=np.float32).reshape(h, w, h * w)
    return FeatureMap(data)


def constant_flow(h, w, u, v, valid=None) -> FlowField:
    uv = np.empty((h, w, 2), dtype=np.float32)
    uv[:, :, 0] = u
    uv[:, :, 1] = v
    return FlowField(uv, valid)


def noise_image(rng, h, w) -> np.ndarray:
    return rng.uniform(0.0, 255.0, size=(h, w))


def rolled_pair(rng, h, w, shift_x, shift_y):
    """A textured image and its circular translation by (shift_x, shift_y).

    Ground-truth flow is (shift_x, shift_y) everywhere except the wrapped
    bands, which an interior margin must exclude.
    """
    img1 = noise_image(rng, h, w)
    img2 = np.roll(np.roll(img1, shift_x, axis=1), shift_y, axis=0)
    return img1, img2


def interior_mask(h, w, margin) -> np.ndarray:
    m = np.zeros((h, w), dtype=bool)
    m[margin : h - margin, margin : w - margin] = True
    return m


# --- independent oracles -------------------------------------------------


def dense_volume_oracle(f1: FeatureMap, f2: FeatureMap) -> np.ndarray:
    """Nested-loop all-pairs inner products in float64, rounded to float32."""
    h, w, c = f1.data.shape
    h2, w2 = f2.data.shape[:2]
    out = np.empty((h, w, h2, w2), dtype=np.float32)
    for y in range(h):
        for x in range(w):
            for y2 in range(h2):
                for x2 in range(w2):
                    acc = 0.0
                    for ch in range(c):
                        acc += float(f1.data[y, x, ch]) * float(f2.data[y2, x2, ch])
                    out[y, x, y2, x2] = np.float32(acc)
    return out


def topk_oracle(scores, k):
    """Top-k by descending value with ascending-index ties, via full sort."""
    s = list(scores)
    order = sorted(range(len(s)), key=lambda i: (-s[i], i))
    return order[:k]


def splat_oracle(coords, values, radius):
    """Reference bilinear splat: per entry, explicit four-neighbor weights."""
    win = 2 * radius + 1
    grid = np.zeros((win, win), dtype=np.float64)
    for (dx, dy), v in zip(np.atleast_2d(coords), np.atleast_1d(values)):
        neighbors_y = {int(np.floor(dy)), int(np.ceil(dy))}
        neighbors_x = {int(np.floor(dx)), int(np.ceil(dx))}
        for gy in sorted(neighbors_y):
            for gx in sorted(neighbors_x):
                wgt = (1.0 - abs(dx - gx)) * (1.0 - abs(dy - gy))
                grid[gy + radius, gx + radius] += wgt * v
    return grid
