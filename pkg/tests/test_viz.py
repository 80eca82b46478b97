"""flow color-wheel rendering."""

import numpy as np

from sparseflow import FlowField, flow_to_color

from conftest import constant_flow


def test_zero_flow_renders_white():
    img = flow_to_color(constant_flow(4, 4, 0.0, 0.0), max_magnitude=1.0)
    assert (img == 255).all()


def test_shape_and_dtype(rng):
    f = FlowField(rng.standard_normal((5, 7, 2)).astype(np.float32))
    img = flow_to_color(f)
    assert img.shape == (5, 7, 3)
    assert img.dtype == np.uint8


def test_antipodal_vectors_get_distinct_saturated_hues():
    uv = np.zeros((1, 2, 2), dtype=np.float32)
    uv[0, 0] = [1.0, 0.0]
    uv[0, 1] = [-1.0, 0.0]
    img = flow_to_color(FlowField(uv), max_magnitude=1.0)
    a, b = img[0, 0].astype(int), img[0, 1].astype(int)
    assert np.abs(a - b).max() > 60  # opposite directions, clearly different hues
    # both at full magnitude: fully saturated wheel colors, nowhere near white
    for px in (a, b):
        assert px.max() >= 250 and px.min() <= 30


def test_same_direction_same_color_across_magnitudes_scaling():
    # scaling flow and max_magnitude together leaves the image unchanged
    uv = np.zeros((2, 2, 2), dtype=np.float32)
    uv[0, 0] = [0.3, -0.7]
    uv[0, 1] = [-1.2, 0.4]
    uv[1, 0] = [2.0, 2.0]
    f1 = FlowField(uv)
    f2 = FlowField(2.0 * uv)
    assert np.array_equal(flow_to_color(f1, 4.0), flow_to_color(f2, 8.0))


def test_magnitude_controls_saturation():
    strong = flow_to_color(constant_flow(1, 1, 1.0, 0.0), max_magnitude=1.0)
    weak = flow_to_color(constant_flow(1, 1, 0.1, 0.0), max_magnitude=1.0)
    # weaker motion is closer to white
    assert weak.astype(int).sum() > strong.astype(int).sum()


def test_invalid_pixels_render_black():
    valid = np.array([[True, False]])
    f = FlowField(np.ones((1, 2, 2), dtype=np.float32), valid)
    img = flow_to_color(f)
    assert (img[0, 1] == 0).all()
    assert (img[0, 0] != 0).any()


def test_deterministic(rng):
    f = FlowField(rng.standard_normal((6, 6, 2)).astype(np.float32))
    assert np.array_equal(flow_to_color(f), flow_to_color(f))
