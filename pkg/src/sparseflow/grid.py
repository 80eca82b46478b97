"""Dense grid types (feature maps, flow fields) and evaluation metrics.

Coordinate convention, fixed repo-wide: x indexes columns (right-positive),
y indexes rows (down-positive). Displacements are measured in pixels at the
grid's own resolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class Coord2(NamedTuple):
    """A 2D position or displacement in pixels (x = column, y = row)."""

    x: float
    y: float


@dataclass(frozen=True)
class FeatureMap:
    """Dense h x w grid of c-dimensional descriptors.

    `data` is (h, w, c) float32, row-major with interleaved channels.
    Treated as immutable after construction.
    """

    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        if data.ndim != 3:
            raise ValueError(f"feature map data must be (h, w, c), got shape {data.shape}")
        h, w, c = data.shape
        if h < 1 or w < 1 or c < 1:
            raise ValueError(f"feature map dims must be >= 1, got {data.shape}")
        if not np.isfinite(data).all():
            raise ValueError("feature map contains non-finite values")
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class FlowField:
    """h x w grid of 2D displacements with an optional per-pixel validity mask.

    `uv` is (h, w, 2) float32 where [..., 0] = u (x displacement) and
    [..., 1] = v (y displacement). Values must be finite wherever `valid`
    is true (everywhere when no mask is given).
    """

    uv: np.ndarray
    valid: np.ndarray | None = None

    def __post_init__(self):
        uv = np.ascontiguousarray(self.uv, dtype=np.float32)
        if uv.ndim != 3 or uv.shape[2] != 2:
            raise ValueError(f"flow data must be (h, w, 2), got shape {uv.shape}")
        if uv.shape[0] < 1 or uv.shape[1] < 1:
            raise ValueError(f"flow dims must be >= 1, got {uv.shape}")
        valid = self.valid
        if valid is not None:
            valid = np.ascontiguousarray(valid, dtype=bool)
            if valid.shape != uv.shape[:2]:
                raise ValueError(
                    f"mask shape {valid.shape} does not match flow {uv.shape[:2]}"
                )
            finite_ok = np.isfinite(uv[valid]).all()
        else:
            finite_ok = np.isfinite(uv).all()
        if not finite_ok:
            raise ValueError("flow contains non-finite values at valid pixels")
        object.__setattr__(self, "uv", uv)
        object.__setattr__(self, "valid", valid)

    @property
    def height(self) -> int:
        return self.uv.shape[0]

    @property
    def width(self) -> int:
        return self.uv.shape[1]

    @property
    def u(self) -> np.ndarray:
        return self.uv[:, :, 0]

    @property
    def v(self) -> np.ndarray:
        return self.uv[:, :, 1]

    @classmethod
    def zeros(cls, height: int, width: int) -> "FlowField":
        return cls(np.zeros((height, width, 2), dtype=np.float32))

    @classmethod
    def constant(cls, height: int, width: int, u: float, v: float) -> "FlowField":
        uv = np.empty((height, width, 2), dtype=np.float32)
        uv[:, :, 0] = u
        uv[:, :, 1] = v
        return cls(uv)


def dot_features(f1: np.ndarray, f2: np.ndarray) -> float:
    """Plain inner product of two descriptors, accumulated in float64."""
    a = np.asarray(f1, dtype=np.float64).ravel()
    b = np.asarray(f2, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"channel counts differ: {a.shape[0]} vs {b.shape[0]}")
    return float(np.dot(a, b))


def bilinear_sample(grid, p) -> np.ndarray | float:
    """Sample a scalar grid, (h, w, C) grid, or FlowField at a real position.

    `p` is (x, y). Out-of-range positions clamp to the edge; integer
    positions reproduce the stored value exactly.
    """
    arr = grid.uv if isinstance(grid, FlowField) else np.asarray(grid, dtype=np.float64)
    if arr.ndim not in (2, 3) or arr.size == 0:
        raise ValueError("cannot sample an empty grid")
    h, w = arr.shape[:2]
    x = min(max(float(p[0]), 0.0), float(w - 1))
    y = min(max(float(p[1]), 0.0), float(h - 1))
    x0 = int(np.floor(x))
    y0 = int(np.floor(y))
    x1 = min(x0 + 1, w - 1)
    y1 = min(y0 + 1, h - 1)
    fx = x - x0
    fy = y - y0
    out = (
        arr[y0, x0] * ((1.0 - fx) * (1.0 - fy))
        + arr[y0, x1] * (fx * (1.0 - fy))
        + arr[y1, x0] * ((1.0 - fx) * fy)
        + arr[y1, x1] * (fx * fy)
    )
    if arr.ndim == 2:
        return float(out)
    return np.asarray(out, dtype=np.float64)


def upsample_flow(flow: FlowField, factor: int) -> FlowField:
    """Bilinearly upsample a flow field and rescale displacements by `factor`.

    Fine pixel (X, Y) samples the coarse grid at (X / factor, Y / factor),
    clamped to the coarse domain; u and v are then multiplied by the factor
    since displacements scale with resolution.
    """
    if int(factor) != factor or factor < 1:
        raise ValueError(f"upsample factor must be an integer >= 1, got {factor}")
    factor = int(factor)
    if factor == 1:
        return FlowField(flow.uv.copy(), None if flow.valid is None else flow.valid.copy())
    h, w = flow.height, flow.width
    ys = np.minimum(np.arange(h * factor, dtype=np.float64) / factor, h - 1.0)
    xs = np.minimum(np.arange(w * factor, dtype=np.float64) / factor, w - 1.0)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ys - y0)[:, None, None]
    fx = (xs - x0)[None, :, None]
    src = flow.uv.astype(np.float64)
    out = (
        src[np.ix_(y0, x0)] * (1.0 - fx) * (1.0 - fy)
        + src[np.ix_(y0, x1)] * fx * (1.0 - fy)
        + src[np.ix_(y1, x0)] * (1.0 - fx) * fy
        + src[np.ix_(y1, x1)] * fx * fy
    )
    out *= factor
    valid = None
    if flow.valid is not None:
        valid = np.repeat(np.repeat(flow.valid, factor, axis=0), factor, axis=1)
    return FlowField(out.astype(np.float32), valid)


def _joint_valid(f: FlowField, gt: FlowField) -> np.ndarray:
    if f.uv.shape != gt.uv.shape:
        raise ValueError(f"flow dims {f.uv.shape[:2]} != ground truth {gt.uv.shape[:2]}")
    valid = np.ones((f.height, f.width), dtype=bool)
    if f.valid is not None:
        valid &= f.valid
    if gt.valid is not None:
        valid &= gt.valid
    return valid


def endpoint_error(f: FlowField, gt: FlowField) -> float:
    """Mean Euclidean distance between flows over valid pixels."""
    valid = _joint_valid(f, gt)
    if not valid.any():
        raise ValueError("no valid pixels to evaluate")
    diff = f.uv.astype(np.float64) - gt.uv.astype(np.float64)
    epe = np.sqrt(diff[:, :, 0] ** 2 + diff[:, :, 1] ** 2)
    return float(epe[valid].mean())


def f1_all(f: FlowField, gt: FlowField) -> float:
    """Percentage of valid pixels whose error exceeds both 3 px and 5% of
    the ground-truth magnitude (the KITTI outlier rule)."""
    valid = _joint_valid(f, gt)
    if not valid.any():
        raise ValueError("no valid pixels to evaluate")
    diff = f.uv.astype(np.float64) - gt.uv.astype(np.float64)
    epe = np.sqrt(diff[:, :, 0] ** 2 + diff[:, :, 1] ** 2)
    mag = np.sqrt(gt.uv[:, :, 0].astype(np.float64) ** 2 + gt.uv[:, :, 1].astype(np.float64) ** 2)
    outlier = (epe > 3.0) & (epe > 0.05 * mag)
    return float(100.0 * outlier[valid].mean())


def sequence_loss(flows: list[FlowField], gt: FlowField, gamma: float = 0.8) -> float:
    """Exponentially weighted sum of per-step mean L1 errors.

    Step i of N is weighted gamma**(N - i); the per-step term is the mean
    over valid pixels of |du| + |dv|. Used as an evaluation diagnostic.
    """
    n = len(flows)
    if n < 1:
        raise ValueError("flow sequence is empty")
    if not (0.0 < gamma <= 1.0):
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    total = 0.0
    for i, f in enumerate(flows, start=1):
        valid = _joint_valid(f, gt)
        if not valid.any():
            raise ValueError("no valid pixels to evaluate")
        diff = np.abs(f.uv.astype(np.float64) - gt.uv.astype(np.float64))
        l1 = (diff[:, :, 0] + diff[:, :, 1])[valid].mean()
        total += gamma ** (n - i) * l1
    return float(total)
