"""Binary containers: round trips, validation, malformed-input robustness."""

import struct

import numpy as np
import pytest

from sparseflow import (
    EncoderConfig,
    FlowField,
    FormatError,
    build_sparse,
    encode,
    read_flo,
    read_scv,
    read_sfm,
    read_smt,
    read_stk,
    topk_search,
    write_flo,
    write_scv,
    write_sfm,
    write_smt,
    write_stk,
)
from sparseflow.formats import (
    dump_flo,
    dump_scv,
    dump_sfm,
    dump_smt,
    dump_stk,
    parse_flo,
    parse_scv,
    parse_sfm,
    parse_smt,
    parse_stk,
)

from conftest import random_feature_map


class TestFloFormat:
    def test_round_trip_bitwise(self, rng, tmp_path):
        f = FlowField(rng.standard_normal((5, 7, 2)).astype(np.float32))
        path = tmp_path / "a.flo"
        write_flo(f, path)
        back = read_flo(path)
        assert back.uv.tobytes() == f.uv.tobytes()
        # second write is byte-identical
        write_flo(back, tmp_path / "b.flo")
        assert (tmp_path / "a.flo").read_bytes() == (tmp_path / "b.flo").read_bytes()

    def test_single_pixel_file_is_twenty_bytes(self, tmp_path):
        # 12-byte header (tag + width + height) plus one 8-byte (u, v) record
        path = tmp_path / "tiny.flo"
        write_flo(FlowField(np.zeros((1, 1, 2), dtype=np.float32)), path)
        assert path.stat().st_size == 20

    def test_wrong_tag_rejected(self):
        data = struct.pack("<f", 123.0) + struct.pack("<2i", 1, 1) + b"\x00" * 8
        with pytest.raises(FormatError):
            parse_flo(data)

    def test_truncated_rejected(self, rng):
        data = dump_flo(FlowField(rng.standard_normal((3, 3, 2)).astype(np.float32)))
        with pytest.raises(FormatError):
            parse_flo(data[:-1])

    def test_trailing_bytes_rejected(self, rng):
        data = dump_flo(FlowField(rng.standard_normal((3, 3, 2)).astype(np.float32)))
        with pytest.raises(FormatError):
            parse_flo(data + b"x")

    def test_negative_dims_rejected(self):
        data = struct.pack("<f", 202021.25) + struct.pack("<2i", -1, 4)
        with pytest.raises(FormatError):
            parse_flo(data)

    def test_huge_dims_rejected(self):
        data = struct.pack("<f", 202021.25) + struct.pack("<2i", 1 << 24, 1 << 24)
        with pytest.raises(FormatError):
            parse_flo(data)

    def test_nan_payload_rejected(self):
        payload = struct.pack("<2f", float("nan"), 0.0)
        data = struct.pack("<f", 202021.25) + struct.pack("<2i", 1, 1) + payload
        with pytest.raises(FormatError):
            parse_flo(data)


class TestSfmFormat:
    def test_round_trip_bitwise(self, rng, tmp_path):
        f = random_feature_map(rng, 4, 6, 9)
        path = tmp_path / "f.sfm"
        write_sfm(f, path)
        assert read_sfm(path).data.tobytes() == f.data.tobytes()

    def test_magic_rejected(self):
        with pytest.raises(FormatError):
            parse_sfm(b"SFMX" + struct.pack("<3I", 1, 1, 1) + b"\x00" * 4)

    def test_payload_size_must_match(self, rng):
        data = dump_sfm(random_feature_map(rng, 2, 2, 2))
        with pytest.raises(FormatError):
            parse_sfm(data[:-4])
        with pytest.raises(FormatError):
            parse_sfm(data + b"\x00\x00\x00\x00")

    def test_zero_channels_rejected(self):
        with pytest.raises(FormatError):
            parse_sfm(b"SFM1" + struct.pack("<3I", 1, 1, 0))


class TestScvFormat:
    def test_round_trip_bitwise(self, rng, tmp_path):
        vol = build_sparse(random_feature_map(rng, 3, 4, 5), random_feature_map(rng, 3, 4, 5), 3)
        path = tmp_path / "v.scv"
        write_scv(vol, path)
        back = read_scv(path)
        assert back.displacements.tobytes() == vol.displacements.tobytes()
        assert back.values.tobytes() == vol.values.tobytes()
        assert back.resolution_divisor == vol.resolution_divisor

    def test_fractional_displacements_survive(self, rng, tmp_path):
        from sparseflow import FlowField as FF
        from sparseflow import shift_volume

        vol = build_sparse(random_feature_map(rng, 2, 2, 3), random_feature_map(rng, 2, 2, 3), 2)
        shifted = shift_volume(vol, FF(np.full((2, 2, 2), 0.25, dtype=np.float32)))
        path = tmp_path / "s.scv"
        write_scv(shifted, path)
        assert read_scv(path).displacements.tobytes() == shifted.displacements.tobytes()

    def test_magic_and_truncation(self, rng):
        vol = build_sparse(random_feature_map(rng, 2, 2, 3), random_feature_map(rng, 2, 2, 3), 2)
        data = dump_scv(vol)
        with pytest.raises(FormatError):
            parse_scv(b"XXXX" + data[4:])
        with pytest.raises(FormatError):
            parse_scv(data[:-3])

    def test_zero_divisor_rejected(self):
        with pytest.raises(FormatError):
            parse_scv(b"SCV1" + struct.pack("<4I", 1, 1, 0, 0))


class TestSmtFormat:
    def test_round_trip_bitwise(self, rng, tmp_path):
        vol = build_sparse(random_feature_map(rng, 3, 3, 4), random_feature_map(rng, 3, 3, 4), 4)
        motion = encode(vol, EncoderConfig(levels=3, radius=2))
        path = tmp_path / "m.smt"
        write_smt(motion, path)
        back = read_smt(path)
        assert back.data.tobytes() == motion.data.tobytes()
        assert (back.levels, back.radius) == (3, 2)

    def test_magic_rejected(self):
        with pytest.raises(FormatError):
            parse_smt(b"TMS1" + struct.pack("<4I", 1, 1, 1, 1))

    def test_payload_must_match_channel_count(self):
        header = b"SMT1" + struct.pack("<4I", 1, 1, 1, 1)
        with pytest.raises(FormatError):
            parse_smt(header + b"\x00" * 4)  # needs 9 channels = 36 bytes


class TestStkFormat:
    def test_round_trip_bitwise(self, rng, tmp_path):
        m = topk_search(random_feature_map(rng, 3, 4, 5), random_feature_map(rng, 2, 5, 5), 4)
        path = tmp_path / "m.stk"
        write_stk(m, path)
        back = read_stk(path)
        assert np.array_equal(back.indices, m.indices)
        assert back.scores.tobytes() == m.scores.tobytes()
        assert back.target_shape == m.target_shape

    def test_out_of_range_index_rejected(self, rng):
        m = topk_search(random_feature_map(rng, 2, 2, 3), random_feature_map(rng, 2, 2, 3), 1)
        data = bytearray(dump_stk(m))
        struct.pack_into("<I", data, 24, 99)  # first record's row
        with pytest.raises(FormatError):
            parse_stk(bytes(data))

    def test_magic_rejected(self):
        with pytest.raises(FormatError):
            parse_stk(b"KTS1" + struct.pack("<5I", 1, 1, 1, 1, 1))


PARSERS = [parse_flo, parse_sfm, parse_scv, parse_smt, parse_stk]


class TestMalformedRobustness:
    @pytest.mark.parametrize("parser", PARSERS)
    def test_random_bytes_never_crash(self, parser):
        rng = np.random.default_rng(99)
        magics = [b"", b"SFM1", b"SCV1", b"SMT1", b"STK1", struct.pack("<f", 202021.25)]
        for i in range(400):
            size = int(rng.integers(0, 200))
            blob = rng.integers(0, 256, size=size, dtype=np.uint8).tobytes()
            if i % 3 == 0:
                blob = magics[i % len(magics)] + blob
            with pytest.raises(FormatError):
                parser(blob)

    def test_mutated_valid_files_never_crash(self, rng):
        f = random_feature_map(rng, 3, 3, 2)
        vol = build_sparse(f, f, 2)
        sources = [
            dump_flo(FlowField(rng.standard_normal((3, 3, 2)).astype(np.float32))),
            dump_sfm(f),
            dump_scv(vol),
            dump_smt(encode(vol, EncoderConfig(levels=2, radius=1))),
            dump_stk(topk_search(f, f, 2)),
        ]
        mut_rng = np.random.default_rng(7)
        for parser, data in zip(PARSERS, sources):
            for _ in range(100):
                blob = bytearray(data)
                kind = int(mut_rng.integers(0, 3))
                if kind == 0 and len(blob) > 1:
                    blob = blob[: int(mut_rng.integers(0, len(blob)))]
                elif kind == 1:
                    pos = int(mut_rng.integers(0, len(blob)))
                    blob[pos] = int(mut_rng.integers(0, 256))
                else:
                    blob += bytes(mut_rng.integers(0, 256, size=5, dtype=np.uint8))
                # mutated input either parses (mutation hit a benign byte)
                # or raises FormatError; anything else is a robustness bug
                try:
                    parser(bytes(blob))
                except FormatError:
                    pass
