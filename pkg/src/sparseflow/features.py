"""Non-learned census descriptors.

Each pixel's descriptor is the sign pattern of its neighborhood: +1 where a
neighbor is brighter than the center, -1 where darker, 0 on ties. The
pattern is translation-equivariant, which is what end-to-end matching demos
need from a feature extractor.
"""

from __future__ import annotations

import numpy as np

from .grid import FeatureMap


def census_features(image: np.ndarray, patch_radius: int = 2) -> FeatureMap:
    """Census-transform descriptors over a (2p+1) x (2p+1) patch.

    Channels hold sign(neighbor - center) for every non-center patch offset
    in row-major order, so c = (2p+1)**2 - 1. Offsets that fall outside the
    image contribute 0.
    """
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"image must be 2-D grayscale, got shape {img.shape}")
    p = int(patch_radius)
    if p < 1:
        raise ValueError(f"patch radius must be >= 1, got {patch_radius}")
    h, w = img.shape
    if h <= 2 * p or w <= 2 * p:
        raise ValueError(f"image dims {img.shape} must exceed 2*patch_radius={2 * p}")
    channels = (2 * p + 1) ** 2 - 1
    out = np.zeros((h, w, channels), dtype=np.float32)
    ch = 0
    for dy in range(-p, p + 1):
        for dx in range(-p, p + 1):
            if dx == 0 and dy == 0:
                continue
            ys0, ys1 = max(0, -dy), min(h, h - dy)
            xs0, xs1 = max(0, -dx), min(w, w - dx)
            center = img[ys0:ys1, xs0:xs1]
            neighbor = img[ys0 + dy : ys1 + dy, xs0 + dx : xs1 + dx]
            out[ys0:ys1, xs0:xs1, ch] = np.sign(neighbor - center)
            ch += 1
    return FeatureMap(out)


def pool_image(image: np.ndarray, factor: int) -> np.ndarray:
    """Average-pool a grayscale image by an integer factor (dims must divide)."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"image must be 2-D grayscale, got shape {img.shape}")
    f = int(factor)
    if f < 1:
        raise ValueError(f"pool factor must be >= 1, got {factor}")
    if f == 1:
        return img
    h, w = img.shape
    if h % f or w % f:
        raise ValueError(f"image dims {img.shape} not divisible by factor {f}")
    return img.reshape(h // f, f, w // f, f).mean(axis=(1, 3))
