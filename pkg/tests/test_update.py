"""displacement-update: coordinate shifts and flow accumulation."""

import numpy as np
import pytest

from sparseflow import FlowField, accumulate_flow, build_sparse, shift_volume

from conftest import constant_flow, random_feature_map


def quarter_flow(rng, h, w, span=8):
    """Flow whose components are multiples of 0.25: exactly representable, so
    shift arithmetic in float32 is exact."""
    uv = rng.integers(-4 * span, 4 * span + 1, size=(h, w, 2)).astype(np.float32) / 4.0
    return FlowField(uv)


def random_volume(rng, h=4, w=5, k=3):
    return build_sparse(random_feature_map(rng, h, w, 6), random_feature_map(rng, h, w, 6), k)


class TestShiftVolume:
    def test_zero_shift_is_identity(self, rng):
        vol = random_volume(rng)
        out = shift_volume(vol, FlowField.zeros(4, 5))
        assert np.array_equal(out.displacements, vol.displacements)
        assert np.array_equal(out.values, vol.values)

    def test_direct_subtraction(self, rng):
        vol = random_volume(rng, 1, 1, 1)
        vol = type(vol)(
            displacements=np.array([[[[3.0, 3.0]]]], dtype=np.float32),
            values=vol.values,
        )
        out = shift_volume(vol, constant_flow(1, 1, 1.0, 2.0))
        assert tuple(out.displacements[0, 0, 0]) == (2.0, 1.0)

    def test_values_never_change(self, rng):
        vol = random_volume(rng)
        out = shift_volume(vol, quarter_flow(rng, 4, 5))
        assert np.array_equal(out.values, vol.values)

    def test_composition_bitwise_on_representable_deltas(self, rng):
        for _ in range(50):
            vol = random_volume(rng)
            a = quarter_flow(rng, 4, 5)
            b = quarter_flow(rng, 4, 5)
            ab = FlowField(a.uv + b.uv)
            two_step = shift_volume(shift_volume(vol, a), b)
            one_step = shift_volume(vol, ab)
            assert two_step.displacements.tobytes() == one_step.displacements.tobytes()

    def test_inverse_bitwise_on_representable_deltas(self, rng):
        for _ in range(50):
            vol = random_volume(rng)
            d = quarter_flow(rng, 4, 5)
            back = shift_volume(shift_volume(vol, d), FlowField(-d.uv))
            assert back.displacements.tobytes() == vol.displacements.tobytes()

    def test_absolute_position_invariant(self, rng):
        # entry displacement plus accumulated flow reproduces the original d0
        vol = random_volume(rng)
        d0 = vol.displacements.copy()
        total = FlowField.zeros(4, 5)
        for _ in range(6):
            step = quarter_flow(rng, 4, 5, span=4)
            vol = shift_volume(vol, step)
            total = accumulate_flow(total, step)
        recovered = vol.displacements + total.uv[:, :, None, :]
        assert np.array_equal(recovered, d0)

    def test_dims_mismatch(self, rng):
        vol = random_volume(rng)
        with pytest.raises(ValueError):
            shift_volume(vol, FlowField.zeros(4, 4))


class TestAccumulateFlow:
    def test_zero_delta_is_identity(self, rng):
        f = quarter_flow(rng, 3, 3)
        out = accumulate_flow(f, FlowField.zeros(3, 3))
        assert np.array_equal(out.uv, f.uv)

    def test_pixelwise_sum(self):
        out = accumulate_flow(constant_flow(2, 2, 1.0, 2.0), constant_flow(2, 2, 3.0, 4.0))
        assert np.allclose(out.uv[:, :, 0], 4.0)
        assert np.allclose(out.uv[:, :, 1], 6.0)

    def test_fold_matches_summation_oracle(self, rng):
        deltas = [quarter_flow(rng, 3, 4, span=4) for _ in range(8)]
        total = FlowField.zeros(3, 4)
        for d in deltas:
            total = accumulate_flow(total, d)
        expect = np.zeros((3, 4, 2), dtype=np.float32)
        for d in deltas:
            expect = expect + d.uv
        assert np.array_equal(total.uv, expect)

    def test_masks_intersect(self):
        a = np.ones((2, 2), dtype=bool)
        a[0, 0] = False
        b = np.ones((2, 2), dtype=bool)
        b[1, 1] = False
        out = accumulate_flow(
            FlowField(np.zeros((2, 2, 2), dtype=np.float32), a),
            FlowField(np.zeros((2, 2, 2), dtype=np.float32), b),
        )
        assert not out.valid[0, 0] and not out.valid[1, 1]
        assert out.valid[0, 1] and out.valid[1, 0]

    def test_dims_mismatch(self):
        with pytest.raises(ValueError):
            accumulate_flow(constant_flow(2, 2, 0, 0), constant_flow(3, 2, 0, 0))
