"""Flow visualization with the standard optical-flow color wheel
(Baker et al., "A Database and Evaluation Methodology for Optical Flow").

Hue encodes direction, saturation encodes magnitude relative to the
normalization maximum; zero flow renders white, invalid pixels black.
"""

from __future__ import annotations

import numpy as np

from .grid import FlowField

# Steps between anchor colors, chosen for perceptual evenness.
_RY, _YG, _GC, _CB, _BM, _MR = 15, 6, 4, 11, 13, 6


def _make_color_wheel() -> np.ndarray:
    total = _RY + _YG + _GC + _CB + _BM + _MR
    wheel = np.zeros((total, 3))
    i = 0
    wheel[i : i + _RY, 0] = 1.0
    wheel[i : i + _RY, 1] = np.arange(_RY) / _RY
    i += _RY
    wheel[i : i + _YG, 0] = 1.0 - np.arange(_YG) / _YG
    wheel[i : i + _YG, 1] = 1.0
    i += _YG
    wheel[i : i + _GC, 1] = 1.0
    wheel[i : i + _GC, 2] = np.arange(_GC) / _GC
    i += _GC
    wheel[i : i + _CB, 1] = 1.0 - np.arange(_CB) / _CB
    wheel[i : i + _CB, 2] = 1.0
    i += _CB
    wheel[i : i + _BM, 0] = np.arange(_BM) / _BM
    wheel[i : i + _BM, 2] = 1.0
    i += _BM
    wheel[i : i + _MR, 0] = 1.0
    wheel[i : i + _MR, 2] = 1.0 - np.arange(_MR) / _MR
    return wheel


_WHEEL = _make_color_wheel()


def flow_to_color(flow: FlowField, max_magnitude: float | None = None) -> np.ndarray:
    """Render a flow field as an (h, w, 3) uint8 RGB image.

    Magnitudes normalize by `max_magnitude` when given, else by the largest
    valid magnitude in the field (scaling flow and max together leaves the
    image unchanged).
    """
    u = flow.uv[:, :, 0].astype(np.float64)
    v = flow.uv[:, :, 1].astype(np.float64)
    mag = np.sqrt(u * u + v * v)
    if max_magnitude is None:
        valid_mag = mag if flow.valid is None else mag[flow.valid]
        max_magnitude = float(valid_mag.max()) if valid_mag.size else 0.0
    norm = max(max_magnitude, 1e-9)

    angle = np.arctan2(-v, -u) / np.pi  # in (-1, 1]
    length = np.clip(mag / norm, 0.0, 1.0)

    n = _WHEEL.shape[0]
    pos = (angle + 1.0) / 2.0 * (n - 1)
    i0 = np.floor(pos).astype(np.int64)
    i1 = (i0 + 1) % n
    frac = (pos - i0)[:, :, None]
    col = (1.0 - frac) * _WHEEL[i0] + frac * _WHEEL[i1]

    # Fade toward white as magnitude drops.
    col = 1.0 - length[:, :, None] * (1.0 - col)
    if flow.valid is not None:
        col[~flow.valid] = 0.0
    return (col * 255.0).round().astype(np.uint8)
