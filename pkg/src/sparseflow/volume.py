"""Sparse and dense correlation volumes, conversions, and memory accounting.

The sparse volume keeps, for every source pixel, the k highest-correlation
entries as (displacement, value) pairs: h*w*k stored values instead of the
dense (h*w)**2. Displacements are (dx, dy) = target - source in pixels and
are held as float32 from the start so later fractional shifts need no
representation change.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from . import knn
from . import _kernels_numpy
from .grid import FeatureMap
from .knn import topk_search

# Dense volumes are a test-scale oracle; refuse to build anything bigger.
DEFAULT_DENSE_BUDGET = 1 << 26


class BudgetExceededError(ValueError):
    """Requested dense volume exceeds the element budget; use the sparse path."""


@dataclass(frozen=True)
class SparseCorrelationVolume:
    """Per source pixel, k (displacement, value) entries.

    `displacements` is (h, w, k, 2) float32 with [..., 0] = dx (columns) and
    [..., 1] = dy (rows); `values` is (h, w, k) float32, sorted descending at
    construction time. `resolution_divisor` records the feature resolution
    relative to the source image (1, 2, 4, 8, ...).
    """

    displacements: np.ndarray
    values: np.ndarray
    resolution_divisor: int = 1

    def __post_init__(self):
        disp = np.ascontiguousarray(self.displacements, dtype=np.float32)
        val = np.ascontiguousarray(self.values, dtype=np.float32)
        if disp.ndim != 4 or disp.shape[3] != 2:
            raise ValueError(f"displacements must be (h, w, k, 2), got {disp.shape}")
        if val.shape != disp.shape[:3]:
            raise ValueError(
                f"values shape {val.shape} does not match displacements {disp.shape[:3]}"
            )
        if disp.shape[0] < 1 or disp.shape[1] < 1:
            raise ValueError(f"volume dims must be >= 1, got {disp.shape[:2]}")
        if self.resolution_divisor < 1:
            raise ValueError(f"resolution divisor must be >= 1, got {self.resolution_divisor}")
        if not np.isfinite(disp).all() or not np.isfinite(val).all():
            raise ValueError("volume contains non-finite entries")
        object.__setattr__(self, "displacements", disp)
        object.__setattr__(self, "values", val)

    @property
    def height(self) -> int:
        return self.displacements.shape[0]

    @property
    def width(self) -> int:
        return self.displacements.shape[1]

    @property
    def k(self) -> int:
        return self.displacements.shape[2]

    @property
    def element_count(self) -> int:
        """Number of stored correlation values (h * w * k)."""
        return self.height * self.width * self.k


@dataclass(frozen=True)
class DenseCorrelationVolume:
    """All-pairs correlation tensor, (h, w, h2, w2) float32.

    values[y, x, y2, x2] is the correlation between source pixel (x, y) and
    target pixel (x2, y2).
    """

    values: np.ndarray

    def __post_init__(self):
        val = np.ascontiguousarray(self.values, dtype=np.float32)
        if val.ndim != 4:
            raise ValueError(f"dense volume must be (h, w, h2, w2), got {val.shape}")
        if min(val.shape) < 1:
            raise ValueError(f"dense volume dims must be >= 1, got {val.shape}")
        if not np.isfinite(val).all():
            raise ValueError("dense volume contains non-finite values")
        object.__setattr__(self, "values", val)

    @property
    def source_shape(self) -> tuple[int, int]:
        return self.values.shape[:2]

    @property
    def target_shape(self) -> tuple[int, int]:
        return self.values.shape[2:]

    @property
    def element_count(self) -> int:
        return self.values.size


def build_sparse(
    f1: FeatureMap,
    f2: FeatureMap,
    k: int = 8,
    scale: float = 1.0,
    resolution_divisor: int = 1,
    backend_name: str | None = None,
) -> SparseCorrelationVolume:
    """Top-k correlation volume: search once, store (target - source, score)."""
    matches = topk_search(f1, f2, k, scale=scale, backend_name=backend_name)
    ys = np.arange(f1.height, dtype=np.float32)[:, None, None]
    xs = np.arange(f1.width, dtype=np.float32)[None, :, None]
    disp = np.empty((f1.height, f1.width, k, 2), dtype=np.float32)
    disp[:, :, :, 0] = matches.indices[:, :, :, 1].astype(np.float32) - xs
    disp[:, :, :, 1] = matches.indices[:, :, :, 0].astype(np.float32) - ys
    return SparseCorrelationVolume(
        displacements=disp,
        values=matches.scores,
        resolution_divisor=resolution_divisor,
    )


def build_dense(
    f1: FeatureMap,
    f2: FeatureMap,
    scale: float = 1.0,
    max_elements: int = DEFAULT_DENSE_BUDGET,
    backend_name: str | None = None,
) -> DenseCorrelationVolume:
    """All-pairs correlation volume; oracle for small instances only."""
    if f1.channels != f2.channels:
        raise ValueError(f"channel counts differ: {f1.channels} vs {f2.channels}")
    total = f1.height * f1.width * f2.height * f2.width
    if total > max_elements:
        raise BudgetExceededError(
            f"dense volume needs {total} elements, budget is {max_elements}; "
            "use the sparse path"
        )
    flat1 = f1.data.reshape(-1, f1.channels)
    flat2 = f2.data.reshape(-1, f2.channels)
    kern = backend.kernels(backend_name)
    scores = kern.dense_correlate(flat1, flat2, float(scale))
    knn._add_evals(flat1.shape[0] * flat2.shape[0])
    return DenseCorrelationVolume(
        values=scores.reshape(f1.height, f1.width, f2.height, f2.width)
    )


def sparsify_topk(
    vol: DenseCorrelationVolume, k: int, resolution_divisor: int = 1
) -> SparseCorrelationVolume:
    """Keep the k largest values per source pixel, discarding the rest."""
    h, w = vol.source_shape
    h2, w2 = vol.target_shape
    n = h2 * w2
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of range [0, {n}]")
    flat = vol.values.reshape(h * w, n)
    # selection always runs through the shared numpy tie rule; the values
    # themselves came from whichever backend built the dense volume
    lin, values = _kernels_numpy.select_topk_rows(flat, k)
    rows = (lin // w2).astype(np.float32)
    cols = (lin % w2).astype(np.float32)
    ys = np.arange(h, dtype=np.float32).repeat(w)[:, None]
    xs = np.tile(np.arange(w, dtype=np.float32), h)[:, None]
    disp = np.stack([cols - xs, rows - ys], axis=-1)
    return SparseCorrelationVolume(
        displacements=disp.reshape(h, w, k, 2),
        values=values.reshape(h, w, k),
        resolution_divisor=resolution_divisor,
    )


def densify(
    scv: SparseCorrelationVolume,
    target_shape: tuple[int, int],
    max_elements: int = DEFAULT_DENSE_BUDGET,
) -> DenseCorrelationVolume:
    """Expand a sparse volume to the full dense tensor (zeros elsewhere).

    Requires integer-valued displacements that land inside the target grid;
    a volume that has been shifted by fractional flow cannot be densified.
    """
    h2, w2 = target_shape
    h, w, k = scv.height, scv.width, scv.k
    total = h * w * h2 * w2
    if total > max_elements:
        raise BudgetExceededError(
            f"dense volume needs {total} elements, budget is {max_elements}"
        )
    disp = scv.displacements
    if k and not np.array_equal(disp, np.trunc(disp)):
        raise ValueError("displacements are not integer-valued (volume already shifted?)")
    dense = np.zeros((h, w, h2, w2), dtype=np.float32)
    if k:
        ys = np.arange(h, dtype=np.int64)[:, None, None]
        xs = np.arange(w, dtype=np.int64)[None, :, None]
        ty = disp[:, :, :, 1].astype(np.int64) + ys
        tx = disp[:, :, :, 0].astype(np.int64) + xs
        if ty.min() < 0 or ty.max() >= h2 or tx.min() < 0 or tx.max() >= w2:
            raise ValueError("displacement points outside the target grid")
        sy = np.broadcast_to(ys, (h, w, k)).reshape(-1)
        sx = np.broadcast_to(xs, (h, w, k)).reshape(-1)
        np.add.at(dense, (sy, sx, ty.reshape(-1), tx.reshape(-1)), scv.values.reshape(-1))
    return DenseCorrelationVolume(values=dense)


# --- memory accounting -------------------------------------------------

VALUE_BYTES = 4  # correlation values are 32-bit floats
COORD_BYTES = 8  # two float32 coordinates per stored entry


@dataclass(frozen=True)
class MemoryReport:
    """Element count and byte size of one correlation-volume variant.

    `bytes` counts 32-bit correlation values only, the convention used for
    published size tables; `bytes_with_coordinates` adds the two float32
    coordinates each sparse entry actually carries.
    """

    resolution_divisor: int
    k: int | None  # None = dense volume
    feature_height: int
    feature_width: int
    element_count: int
    bytes: int
    bytes_with_coordinates: int

    @property
    def variant(self) -> str:
        return "dense" if self.k is None else f"k={self.k}"


def memory_report(
    image_height: int, image_width: int, divisor: int, k: int | None = None
) -> MemoryReport:
    """Size of the correlation volume for an image pair at 1/divisor resolution.

    Feature dims are floor(image / divisor). Dense volumes store (h*w)**2
    values; top-k volumes store h*w*k.
    """
    if divisor < 1:
        raise ValueError(f"divisor must be >= 1, got {divisor}")
    h = image_height // divisor
    w = image_width // divisor
    if h < 1 or w < 1:
        raise ValueError(f"feature dims degenerate: {h}x{w}")
    if k is None:
        count = (h * w) ** 2
        coord_extra = 0
    else:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        count = h * w * k
        coord_extra = count * COORD_BYTES
    return MemoryReport(
        resolution_divisor=divisor,
        k=k,
        feature_height=h,
        feature_width=w,
        element_count=count,
        bytes=count * VALUE_BYTES,
        bytes_with_coordinates=count * VALUE_BYTES + coord_extra,
    )


def format_element_count(count: int) -> str:
    """Two-significant-figure scientific form, e.g. 778633216 -> '7.8e8'."""
    if count <= 0:
        return "0"
    exp = int(np.floor(np.log10(count)))
    mant = count / 10.0 ** exp
    mant = round(mant, 1)
    if mant >= 10.0:
        mant /= 10.0
        exp += 1
    return f"{mant:.1f}e{exp}"


def format_bytes(num_bytes: int) -> str:
    """Decimal-unit byte string at the precision used in size tables."""
    if num_bytes >= 10 ** 9:
        return f"{num_bytes / 1e9:.1f} GB"
    if num_bytes >= 10 ** 8:
        return f"{num_bytes / 1e6:.0f} MB"
    if num_bytes >= 10 ** 5:
        return f"{num_bytes / 1e6:.1f} MB"
    if num_bytes >= 10 ** 3:
        return f"{num_bytes / 1e3:.1f} kB"
    return f"{num_bytes} B"


TABLE_SPARSITIES: tuple[int | None, ...] = (None, 8, 32, 128)
TABLE_DIVISORS: tuple[int, ...] = (4, 8)


def size_table(image_height: int = 436, image_width: int = 1024) -> str:
    """Render the full size/memory table for both resolutions and all
    sparsity variants (dense, k=8, k=32, k=128)."""
    reports = {
        (div, k): memory_report(image_height, image_width, div, k)
        for div in TABLE_DIVISORS
        for k in TABLE_SPARSITIES
    }
    lines = [
        f"Correlation volume size and memory for a {image_height}x{image_width} "
        "image pair (32-bit values)",
        "",
        (
            f"{'sparsity':<10} {'1/4 elements':<14} {'1/4 memory':<12} "
            f"{'1/8 elements':<14} {'1/8 memory':<12}"
        ).rstrip(),
    ]
    for k in TABLE_SPARSITIES:
        label = "dense" if k is None else f"k={k}"
        r4 = reports[(4, k)]
        r8 = reports[(8, k)]
        lines.append(
            f"{label:<10} {format_element_count(r4.element_count):<14} "
            f"{format_bytes(r4.bytes):<12} "
            f"{format_element_count(r8.element_count):<14} "
            f"{format_bytes(r8.bytes):<12}".rstrip()
        )
    return "\n".join(lines) + "\n"
