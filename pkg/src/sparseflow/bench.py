"""Scaling and backend benchmark for the hot kernels.

For a sweep of square grid sizes, times exact top-k search and motion-tensor
encoding on every requested backend (numba and the pure-numpy fallback), and
checks the sparse storage law: a volume over an N x N grid holds exactly
h*w*k values regardless of backend. Search cost scales with the squared
pixel count times channels; sparse memory scales with pixel count times k.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import backend
from .encoder import EncoderConfig, encode
from .grid import FeatureMap
from .volume import build_sparse


@dataclass(frozen=True)
class BenchRow:
    size: int
    pixels: int
    k: int
    channels: int
    element_count: int
    topk_seconds: dict[str, float]
    encode_seconds: dict[str, float]


def _available_backends(requested: list[str] | None) -> list[str]:
    if requested:
        return requested
    names = []
    for name in ("numba", "numpy"):
        try:
            backend.kernels(name)
        except ImportError:
            continue
        names.append(name)
    return names


def run_bench(
    sizes: list[int],
    k: int = 8,
    channels: int = 32,
    repeats: int = 3,
    backends: list[str] | None = None,
    seed: int = 0,
    encoder_cfg: EncoderConfig | None = None,
) -> list[BenchRow]:
    """Time topk_search-driven volume construction and encoding per backend.

    Raises if any volume's stored element count deviates from h*w*k.
    """
    if encoder_cfg is None:
        encoder_cfg = EncoderConfig()
    names = _available_backends(backends)
    if not names:
        raise RuntimeError("no kernel backend available")
    rng = np.random.default_rng(seed)
    rows = []
    for size in sizes:
        if size < 1:
            raise ValueError(f"grid size must be >= 1, got {size}")
        f1 = FeatureMap(rng.standard_normal((size, size, channels)).astype(np.float32))
        f2 = FeatureMap(rng.standard_normal((size, size, channels)).astype(np.float32))
        topk_times: dict[str, float] = {}
        encode_times: dict[str, float] = {}
        element_count = -1
        for name in names:
            # Warm-up pass covers JIT compilation so timings measure steady state.
            vol = build_sparse(f1, f2, k, backend_name=name)
            encode(vol, encoder_cfg, backend_name=name)
            best_t = np.inf
            for _ in range(repeats):
                t0 = time.perf_counter()
                vol = build_sparse(f1, f2, k, backend_name=name)
                best_t = min(best_t, time.perf_counter() - t0)
            topk_times[name] = best_t
            best_e = np.inf
            for _ in range(repeats):
                t0 = time.perf_counter()
                encode(vol, encoder_cfg, backend_name=name)
                best_e = min(best_e, time.perf_counter() - t0)
            encode_times[name] = best_e
            if vol.element_count != size * size * k:
                raise AssertionError(
                    f"element-count law violated: {vol.element_count} != {size * size * k}"
                )
            element_count = vol.element_count
        rows.append(
            BenchRow(
                size=size,
                pixels=size * size,
                k=k,
                channels=channels,
                element_count=element_count,
                topk_seconds=topk_times,
                encode_seconds=encode_times,
            )
        )
    return rows


def format_bench(rows: list[BenchRow]) -> str:
    if not rows:
        return "no benchmark rows\n"
    names = sorted(rows[0].topk_seconds)
    header = f"{'size':<8} {'pixels':<8} {'k':<4} {'elements':<10}"
    for name in names:
        header += f" {'topk[' + name + ']':<14} {'encode[' + name + ']':<14}"
    lines = [header.rstrip()]
    for row in rows:
        line = f"{row.size:<8} {row.pixels:<8} {row.k:<4} {row.element_count:<10}"
        for name in names:
            line += f" {row.topk_seconds[name]:<14.4f} {row.encode_seconds[name]:<14.4f}"
        lines.append(line.rstrip())
    lines.append("")
    lines.append(f"element-count law h*w*k: ok ({len(rows)} sizes checked)")
    return "\n".join(lines) + "\n"
