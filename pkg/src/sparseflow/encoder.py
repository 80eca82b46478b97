"""Multi-scale displacement encoder: sparse volume -> dense motion tensor.

Per pixel and pyramid level, entry coordinates are divided by the level
divisor, windowed to an L-inf radius, and bilinearly splatted onto the
integer cells of a (2r+1) x (2r+1) grid. The per-level grids concatenate
into L*(2r+1)**2 channels per pixel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .grid import Coord2
from .volume import SparseCorrelationVolume


@dataclass(frozen=True)
class EncoderConfig:
    """Pyramid depth and window radius. Level l scales coordinates by
    1 / 2**(l-1), so the default five levels divide by (1, 2, 4, 8, 16)."""

    levels: int = 5
    radius: int = 3

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")
        if self.radius < 1:
            raise ValueError(f"radius must be >= 1, got {self.radius}")

    @property
    def level_divisors(self) -> tuple[int, ...]:
        return tuple(2 ** (l - 1) for l in range(1, self.levels + 1))

    @property
    def window_cells(self) -> int:
        return (2 * self.radius + 1) ** 2

    @property
    def channels(self) -> int:
        return self.levels * self.window_cells


@dataclass(frozen=True)
class MotionTensor:
    """Dense per-pixel motion encoding, (h, w, L*(2r+1)**2) float32.

    Channel layout is level-major, then window cells row-major starting at
    displacement (-r, -r): channel = (level-1)*(2r+1)**2 + (dy+r)*(2r+1) + (dx+r).
    """

    data: np.ndarray
    levels: int
    radius: int

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        win2 = (2 * self.radius + 1) ** 2
        if data.ndim != 3 or data.shape[2] != self.levels * win2:
            raise ValueError(
                f"motion tensor must have {self.levels * win2} channels, got shape {data.shape}"
            )
        if not np.isfinite(data).all():
            raise ValueError("motion tensor contains non-finite values")
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

    def level_channels(self, level: int) -> np.ndarray:
        """The (h, w, (2r+1)**2) slice for one pyramid level (1-based)."""
        if not 1 <= level <= self.levels:
            raise ValueError(f"level {level} out of range [1, {self.levels}]")
        win2 = (2 * self.radius + 1) ** 2
        base = (level - 1) * win2
        return self.data[:, :, base : base + win2]


def scale_to_level(d, level: int, levels: int | None = None):
    """Divide a displacement by 2**(level-1). Accepts Coord2 or an array."""
    if level < 1 or (levels is not None and level > levels):
        raise ValueError(f"level {level} out of range")
    div = float(2 ** (level - 1))
    if isinstance(d, Coord2):
        return Coord2(d.x / div, d.y / div)
    return np.asarray(d) / div


def window_filter(
    coords: np.ndarray, values: np.ndarray, radius: int
) -> tuple[np.ndarray, np.ndarray]:
    """Keep entries whose (already level-scaled) coords satisfy
    max(|dx|, |dy|) <= radius; both bounds inclusive."""
    coords = np.asarray(coords, dtype=np.float64).reshape(-1, 2)
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    keep = (np.abs(coords[:, 0]) <= radius) & (np.abs(coords[:, 1]) <= radius)
    return coords[keep], values[keep]


def bilinear_splat(coords: np.ndarray, values: np.ndarray, radius: int) -> np.ndarray:
    """Splat windowed entries onto the (2r+1) x (2r+1) integer grid.

    Each entry at real (dx, dy) adds value * (1-|dx-gx|)(1-|dy-gy|) to its
    integer neighbors (gx, gy); grid[row, col] covers displacement
    (col - r, row - r). Every neighbor of an in-window entry lies in-grid.
    """
    coords = np.asarray(coords, dtype=np.float64).reshape(-1, 2)
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    win = 2 * radius + 1
    grid = np.zeros((win, win), dtype=np.float64)
    for (dx, dy), v in zip(coords, values):
        if max(abs(dx), abs(dy)) > radius:
            raise ValueError(f"entry ({dx}, {dy}) outside window radius {radius}")
        x0 = int(np.floor(dx))
        y0 = int(np.floor(dy))
        fx = dx - x0
        fy = dy - y0
        grid[y0 + radius, x0 + radius] += (1.0 - fx) * (1.0 - fy) * v
        if fx > 0.0:
            grid[y0 + radius, x0 + radius + 1] += fx * (1.0 - fy) * v
        if fy > 0.0:
            grid[y0 + radius + 1, x0 + radius] += (1.0 - fx) * fy * v
        if fx > 0.0 and fy > 0.0:
            grid[y0 + radius + 1, x0 + radius + 1] += fx * fy * v
    return grid


def encode(
    scv: SparseCorrelationVolume,
    cfg: EncoderConfig | None = None,
    backend_name: str | None = None,
) -> MotionTensor:
    """Scale, window, and splat every entry at every level; concatenate the
    per-level grids into the motion tensor."""
    if cfg is None:
        cfg = EncoderConfig()
    h, w, k = scv.height, scv.width, scv.k
    disp = scv.displacements.reshape(h * w, k, 2)
    values = scv.values.reshape(h * w, k)
    kern = backend.kernels(backend_name)
    acc = kern.encode_accumulate(disp, values, cfg.levels, cfg.radius)
    data = acc.astype(np.float32).reshape(h, w, cfg.channels)
    return MotionTensor(data=data, levels=cfg.levels, radius=cfg.radius)
