"""Binary file formats: Middlebury .flo plus the package's own containers.

All multi-byte fields are little-endian. Each format has a bytes-level
parse/dump pair and path-level read/write wrappers. Parsers validate
exhaustively and raise FormatError on any malformed input; they never
crash on arbitrary bytes.

    .flo   f32 tag 202021.25, i32 width, i32 height, f32 (u, v) pairs
    SFM1   feature map: u32 h, w, c, then f32 data row-major interleaved
    SCV1   sparse volume: u32 h, w, k, divisor, then per-pixel k records
           of (f32 dx, f32 dy, f32 value), pixels row-major
    SMT1   motion tensor: u32 h, w, levels, radius, then f32 data row-major
    STK1   top-k matches: u32 h, w, k, h2, w2, then per-pixel k records
           of (u32 row, u32 col, f32 score)
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .encoder import MotionTensor
from .grid import FlowField, FeatureMap
from .knn import TopKMatches
from .volume import SparseCorrelationVolume

FLO_TAG = 202021.25
FLO_TAG_BYTES = struct.pack("<f", FLO_TAG)
MAX_DIM = 1 << 20  # per-axis sanity bound for all containers
MAX_PIXELS = 1 << 28


class FormatError(ValueError):
    """Raised for any malformed or out-of-contract binary input."""


def _need(data: bytes, count: int, what: str) -> None:
    if len(data) < count:
        raise FormatError(f"truncated {what}: need {count} bytes, have {len(data)}")


def _exact(data: bytes, count: int, what: str) -> None:
    _need(data, count, what)
    if len(data) > count:
        raise FormatError(f"{what} has {len(data) - count} trailing bytes")


def _u32_fields(data: bytes, offset: int, n: int) -> tuple[int, ...]:
    return struct.unpack_from(f"<{n}I", data, offset)


def _check_dim(value: int, name: str, minimum: int = 1) -> int:
    if not minimum <= value <= MAX_DIM:
        raise FormatError(f"{name}={value} outside [{minimum}, {MAX_DIM}]")
    return value


def _f32_payload(data: bytes, offset: int, count: int, what: str) -> np.ndarray:
    _exact(data, offset + 4 * count, what)
    return np.frombuffer(data, dtype="<f4", count=count, offset=offset)


# --- Middlebury .flo ----------------------------------------------------


def parse_flo(data: bytes) -> FlowField:
    _need(data, 12, ".flo header")
    if data[:4] != FLO_TAG_BYTES:
        raise FormatError(f".flo tag mismatch (expected {FLO_TAG})")
    w, h = struct.unpack_from("<2i", data, 4)
    _check_dim(w, "width")
    _check_dim(h, "height")
    if h * w > MAX_PIXELS:
        raise FormatError(f".flo dimensions {w}x{h} exceed the pixel budget")
    payload = _f32_payload(data, 12, 2 * h * w, ".flo payload")
    try:
        return FlowField(payload.reshape(h, w, 2).copy())
    except ValueError as e:
        raise FormatError(f"invalid .flo contents: {e}") from e


def dump_flo(flow: FlowField) -> bytes:
    header = FLO_TAG_BYTES + struct.pack("<2i", flow.width, flow.height)
    return header + flow.uv.astype("<f4").tobytes()


# --- SFM1 feature maps --------------------------------------------------


def parse_sfm(data: bytes) -> FeatureMap:
    _need(data, 16, "SFM1 header")
    if data[:4] != b"SFM1":
        raise FormatError("SFM1 magic mismatch")
    h, w, c = _u32_fields(data, 4, 3)
    _check_dim(h, "height")
    _check_dim(w, "width")
    _check_dim(c, "channels")
    if h * w > MAX_PIXELS:
        raise FormatError(f"SFM1 dimensions {h}x{w} exceed the pixel budget")
    payload = _f32_payload(data, 16, h * w * c, "SFM1 payload")
    try:
        return FeatureMap(payload.reshape(h, w, c).copy())
    except ValueError as e:
        raise FormatError(f"invalid SFM1 contents: {e}") from e


def dump_sfm(fmap: FeatureMap) -> bytes:
    header = b"SFM1" + struct.pack("<3I", fmap.height, fmap.width, fmap.channels)
    return header + fmap.data.astype("<f4").tobytes()


# --- SCV1 sparse correlation volumes ------------------------------------


def parse_scv(data: bytes) -> SparseCorrelationVolume:
    _need(data, 20, "SCV1 header")
    if data[:4] != b"SCV1":
        raise FormatError("SCV1 magic mismatch")
    h, w, k, divisor = _u32_fields(data, 4, 4)
    _check_dim(h, "height")
    _check_dim(w, "width")
    _check_dim(k, "k", minimum=0)
    _check_dim(divisor, "divisor")
    if h * w > MAX_PIXELS:
        raise FormatError(f"SCV1 dimensions {h}x{w} exceed the pixel budget")
    payload = _f32_payload(data, 20, 3 * h * w * k, "SCV1 payload")
    records = payload.reshape(h, w, k, 3)
    try:
        return SparseCorrelationVolume(
            displacements=records[:, :, :, :2].copy(),
            values=records[:, :, :, 2].copy(),
            resolution_divisor=divisor,
        )
    except ValueError as e:
        raise FormatError(f"invalid SCV1 contents: {e}") from e


def dump_scv(scv: SparseCorrelationVolume) -> bytes:
    header = b"SCV1" + struct.pack(
        "<4I", scv.height, scv.width, scv.k, scv.resolution_divisor
    )
    records = np.concatenate(
        [scv.displacements, scv.values[:, :, :, None]], axis=3
    ).astype("<f4")
    return header + records.tobytes()


# --- SMT1 motion tensors ------------------------------------------------


def parse_smt(data: bytes) -> MotionTensor:
    _need(data, 20, "SMT1 header")
    if data[:4] != b"SMT1":
        raise FormatError("SMT1 magic mismatch")
    h, w, levels, radius = _u32_fields(data, 4, 4)
    _check_dim(h, "height")
    _check_dim(w, "width")
    _check_dim(levels, "levels")
    if not 1 <= radius <= 255:
        raise FormatError(f"radius={radius} outside [1, 255]")
    if h * w > MAX_PIXELS:
        raise FormatError(f"SMT1 dimensions {h}x{w} exceed the pixel budget")
    channels = levels * (2 * radius + 1) ** 2
    payload = _f32_payload(data, 20, h * w * channels, "SMT1 payload")
    try:
        return MotionTensor(
            data=payload.reshape(h, w, channels).copy(), levels=levels, radius=radius
        )
    except ValueError as e:
        raise FormatError(f"invalid SMT1 contents: {e}") from e


def dump_smt(motion: MotionTensor) -> bytes:
    header = b"SMT1" + struct.pack(
        "<4I", motion.height, motion.width, motion.levels, motion.radius
    )
    return header + motion.data.astype("<f4").tobytes()


# --- STK1 top-k matches -------------------------------------------------


def parse_stk(data: bytes) -> TopKMatches:
    _need(data, 24, "STK1 header")
    if data[:4] != b"STK1":
        raise FormatError("STK1 magic mismatch")
    h, w, k, h2, w2 = _u32_fields(data, 4, 5)
    _check_dim(h, "height")
    _check_dim(w, "width")
    _check_dim(k, "k")
    _check_dim(h2, "target height")
    _check_dim(w2, "target width")
    if h * w > MAX_PIXELS:
        raise FormatError(f"STK1 dimensions {h}x{w} exceed the pixel budget")
    count = 3 * h * w * k
    _exact(data, 24 + 4 * count, "STK1 payload")
    raw = np.frombuffer(data, dtype="<u4", count=count, offset=24).reshape(h, w, k, 3)
    rows = raw[:, :, :, 0]
    cols = raw[:, :, :, 1]
    if rows.max(initial=0) >= h2 or cols.max(initial=0) >= w2:
        raise FormatError("STK1 match index outside the target grid")
    scores = raw[:, :, :, 2].copy().view("<f4")
    try:
        return TopKMatches(
            indices=np.stack([rows, cols], axis=-1).astype(np.int32),
            scores=scores,
            target_shape=(h2, w2),
        )
    except ValueError as e:
        raise FormatError(f"invalid STK1 contents: {e}") from e


def dump_stk(matches: TopKMatches) -> bytes:
    h2, w2 = matches.target_shape
    header = b"STK1" + struct.pack(
        "<5I", matches.height, matches.width, matches.k, h2, w2
    )
    raw = np.empty((matches.height, matches.width, matches.k, 3), dtype="<u4")
    raw[:, :, :, 0] = matches.indices[:, :, :, 0].astype(np.uint32)
    raw[:, :, :, 1] = matches.indices[:, :, :, 1].astype(np.uint32)
    raw[:, :, :, 2] = matches.scores.astype("<f4").view("<u4")
    return header + raw.tobytes()


# --- path-level wrappers ------------------------------------------------


def _read_bytes(path) -> bytes:
    return Path(path).read_bytes()


def read_flo(path) -> FlowField:
    return parse_flo(_read_bytes(path))


def write_flo(flow: FlowField, path) -> None:
    Path(path).write_bytes(dump_flo(flow))


def read_sfm(path) -> FeatureMap:
    return parse_sfm(_read_bytes(path))


def write_sfm(fmap: FeatureMap, path) -> None:
    Path(path).write_bytes(dump_sfm(fmap))


def read_scv(path) -> SparseCorrelationVolume:
    return parse_scv(_read_bytes(path))


def write_scv(scv: SparseCorrelationVolume, path) -> None:
    Path(path).write_bytes(dump_scv(scv))


def read_smt(path) -> MotionTensor:
    return parse_smt(_read_bytes(path))


def write_smt(motion: MotionTensor, path) -> None:
    Path(path).write_bytes(dump_smt(motion))


def read_stk(path) -> TopKMatches:
    return parse_stk(_read_bytes(path))


def write_stk(matches: TopKMatches, path) -> None:
    Path(path).write_bytes(dump_stk(matches))
