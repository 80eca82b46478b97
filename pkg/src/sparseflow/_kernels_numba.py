"""Numba-jitted kernels: the default hot path behind `backend.kernels`.

Mirrors `_kernels_numpy` semantics: float64 accumulation rounded to float32
before selection, descending-score order with index-ascending ties, and a
float64 splat accumulator. Loops are sequential per source pixel, so output
is bit-identical across runs and thread counts.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def dense_correlate(f1, f2, scale):
    p_count, c = f1.shape
    n = f2.shape[0]
    out = np.empty((p_count, n), dtype=np.float32)
    for i in range(p_count):
        for j in range(n):
            acc = 0.0
            for ch in range(c):
                acc += np.float64(f1[i, ch]) * np.float64(f2[j, ch])
            out[i, j] = np.float32(acc * scale)
    return out


@njit(cache=True)
def topk_correlate(f1, f2, k, scale):
    p_count, c = f1.shape
    n = f2.shape[0]
    idx = np.empty((p_count, k), dtype=np.int64)
    val = np.empty((p_count, k), dtype=np.float32)
    vbuf = np.empty(k, dtype=np.float32)
    ibuf = np.empty(k, dtype=np.int64)
    for i in range(p_count):
        count = 0
        for j in range(n):
            acc = 0.0
            for ch in range(c):
                acc += np.float64(f1[i, ch]) * np.float64(f2[j, ch])
            s = np.float32(acc * scale)
            # Running insertion keeps vbuf descending; an incoming score equal
            # to the current minimum loses (earlier index wins), and equal
            # scores inside the buffer stay ahead of the newcomer.
            if count == k and s <= vbuf[k - 1]:
                continue
            pos = 0
            while pos < count and vbuf[pos] >= s:
                pos += 1
            end = count if count < k else k - 1
            q = end
            while q > pos:
                vbuf[q] = vbuf[q - 1]
                ibuf[q] = ibuf[q - 1]
                q -= 1
            vbuf[pos] = s
            ibuf[pos] = j
            if count < k:
                count += 1
        for m in range(k):
            idx[i, m] = ibuf[m]
            val[i, m] = vbuf[m]
    return idx, val


@njit(cache=True)
def encode_accumulate(disp, values, levels, radius):
    p_count, k = values.shape
    win = 2 * radius + 1
    win2 = win * win
    out = np.zeros((p_count, levels * win2), dtype=np.float64)
    for p in range(p_count):
        for lvl in range(levels):
            div = np.float64(2 ** lvl)
            base = lvl * win2
            for e in range(k):
                dx = np.float64(disp[p, e, 0]) / div
                dy = np.float64(disp[p, e, 1]) / div
                if abs(dx) > radius or abs(dy) > radius:
                    continue
                x0 = int(np.floor(dx))
                y0 = int(np.floor(dy))
                fx = dx - x0
                fy = dy - y0
                v = np.float64(values[p, e])
                c00 = base + (y0 + radius) * win + (x0 + radius)
                out[p, c00] += (1.0 - fx) * (1.0 - fy) * v
                if fx > 0.0:
                    out[p, c00 + 1] += fx * (1.0 - fy) * v
                if fy > 0.0:
                    out[p, c00 + win] += (1.0 - fx) * fy * v
                if fx > 0.0 and fy > 0.0:
                    out[p, c00 + win + 1] += fx * fy * v
    return out
