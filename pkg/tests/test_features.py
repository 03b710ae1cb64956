import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hierpix.features import (
    appearance_indices,
    assemble_features,
    clicks_to_attention,
    position_planes,
    resample_attention,
    rgb_to_lab,
)
from hierpix.imgio import Click


def _lab_unscaled(rgb_triple):
    img = np.array([[rgb_triple]], dtype=np.uint8)
    scaled = rgb_to_lab(img)[0, 0]
    return scaled[0] * 100.0, scaled[1] * 255.0 - 128.0, scaled[2] * 255.0 - 128.0


class TestRgbToLab:
    def test_white(self):
        scaled = rgb_to_lab(np.full((1, 1, 3), 255, dtype=np.uint8))[0, 0]
        assert scaled[0] == pytest.approx(1.0, abs=1e-9)
        assert scaled[1] == pytest.approx(128 / 255, abs=1e-9)
        assert scaled[2] == pytest.approx(128 / 255, abs=1e-9)

    def test_black_has_zero_lightness(self):
        scaled = rgb_to_lab(np.zeros((1, 1, 3), dtype=np.uint8))[0, 0]
        assert scaled[0] == pytest.approx(0.0, abs=1e-12)

    def test_mid_gray_is_achromatic(self):
        scaled = rgb_to_lab(np.full((1, 1, 3), 119, dtype=np.uint8))[0, 0]
        assert scaled[1] == pytest.approx(scaled[2], abs=1e-12)

    def test_primary_red_reference_values(self):
        # reference CIELAB (D65) for sRGB (255, 0, 0)
        l, a, b = _lab_unscaled((255, 0, 0))
        assert l == pytest.approx(53.2408, abs=2e-3)
        assert a == pytest.approx(80.0925, abs=2e-3)
        assert b == pytest.approx(67.2032, abs=2e-3)

    def test_primary_blue_reference_values(self):
        l, a, b = _lab_unscaled((0, 0, 255))
        assert l == pytest.approx(32.297, abs=2e-3)
        assert a == pytest.approx(79.188, abs=2e-3)
        assert b == pytest.approx(-107.86, abs=2e-3)

    def test_output_within_unit_interval_for_random_images(self, rng):
        img = rng.integers(0, 256, (13, 17, 3), dtype=np.uint8)
        lab = rgb_to_lab(img)
        assert lab.min() >= 0.0 and lab.max() <= 1.0


class TestPositionPlanes:
    def test_2x2_corners(self):
        pos = position_planes(2, 2)
        assert pos[0, 0].tolist() == [0.0, 0.0]
        assert pos[0, 1].tolist() == [1.0, 0.0]
        assert pos[1, 0].tolist() == [0.0, 1.0]
        assert pos[1, 1].tolist() == [1.0, 1.0]

    def test_degenerate_height(self):
        pos = position_planes(3, 1)
        assert pos[0, :, 0].tolist() == [0.0, 0.5, 1.0]
        assert (pos[..., 1] == 0).all()

    def test_benchmark_center_pixel(self):
        pos = position_planes(481, 321)
        assert pos[160, 240].tolist() == [0.5, 0.5]

    @given(w=st.integers(2, 40), h=st.integers(2, 40))
    @settings(max_examples=30, deadline=None)
    def test_bounded_and_strictly_monotone(self, w, h):
        pos = position_planes(w, h)
        assert pos.min() == 0.0 and pos.max() == 1.0
        assert (np.diff(pos[0, :, 0]) > 0).all()
        assert (np.diff(pos[:, 0, 1]) > 0).all()


class TestAssembleFeatures:
    def test_default_stack_is_twenty_channels(self, rng):
        lab = rng.random((4, 6, 3))
        pos = position_planes(6, 4)
        deep = rng.random((4, 6, 15))
        field = assemble_features(lab, pos, deep)
        assert field.shape == (4, 6, 20)

    def test_color_only_mode_is_five_channels(self, rng):
        field = assemble_features(rng.random((4, 6, 3)), position_planes(6, 4))
        assert field.shape == (4, 6, 5)

    def test_slicing_recovers_inputs_bit_exact(self, rng):
        lab = rng.random((5, 5, 3))
        pos = position_planes(5, 5)
        deep = rng.random((5, 5, 7))
        field = assemble_features(lab, pos, deep)
        assert np.array_equal(field[..., :3], lab)
        assert np.array_equal(field[..., 3:5], pos)
        assert np.array_equal(field[..., 5:], deep)

    def test_mismatched_heights_rejected(self, rng):
        with pytest.raises(ValueError):
            assemble_features(rng.random((4, 6, 3)), position_planes(6, 5))

    def test_appearance_indices_skip_position_channels(self):
        assert appearance_indices(20).tolist() == [0, 1, 2] + list(range(5, 20))
        assert appearance_indices(5).tolist() == [0, 1, 2]
        with pytest.raises(ValueError):
            appearance_indices(4)


class TestResampleAttention:
    def test_constant_map_stays_constant(self):
        out = resample_attention(np.full((3, 4), 0.7), 9, 5)
        assert out.shape == (5, 9)
        assert out == pytest.approx(np.full((5, 9), 0.7))

    def test_single_sample_broadcast(self):
        out = resample_attention(np.array([[0.3]]), 4, 3)
        assert out == pytest.approx(np.full((3, 4), 0.3))

    def test_bilinear_midpoint(self):
        out = resample_attention(np.array([[0.0, 1.0]]), 3, 1)
        assert out[0].tolist() == pytest.approx([0.0, 0.5, 1.0])

    def test_empty_map_rejected(self):
        with pytest.raises(ValueError):
            resample_attention(np.zeros((0, 3)), 2, 2)


class TestClicksToAttention:
    def test_no_clicks_no_base_gives_zeros(self):
        out = clicks_to_attention([], None, 5, 4)
        assert out.shape == (4, 5)
        assert (out == 0).all()

    def test_no_clicks_returns_base_unchanged(self, rng):
        base = rng.random((6, 7))
        out = clicks_to_attention([], base, 7, 6)
        assert np.array_equal(out, base)
        out[0, 0] = 2.0  # returned map is a copy
        assert base[0, 0] != 2.0

    def test_positive_click_peaks_at_strength_one(self):
        out = clicks_to_attention([Click(4, 3, 1, 1.0)], None, 9, 7)
        assert out[3, 4] == pytest.approx(1.0)
        assert out.max() == out[3, 4]

    def test_opposite_clicks_cancel(self):
        clicks = [Click(2, 2, 1, 1.0), Click(2, 2, -1, 1.0)]
        out = clicks_to_attention(clicks, None, 5, 5)
        assert out[2, 2] == pytest.approx(0.0)

    def test_gaussian_footprint_at_one_sigma(self):
        width = height = 41
        sigma = 0.05 * np.hypot(width, height)
        dx = int(round(sigma))
        out = clicks_to_attention([Click(20, 20, 1, 1.0)], None, width, height)
        expected = np.exp(-(dx**2) / (2 * sigma**2))
        assert out[20, 20 + dx] == pytest.approx(expected)

    def test_result_clamped_to_unit_interval(self):
        out = clicks_to_attention([Click(1, 1, 1, 50.0)], None, 4, 4)
        assert out.max() <= 1.0
        out = clicks_to_attention([Click(1, 1, -1, 50.0)], None, 4, 4)
        assert out.min() >= 0.0

    def test_out_of_bounds_click_rejected(self):
        with pytest.raises(ValueError):
            clicks_to_attention([Click(9, 0, 1, 1.0)], None, 5, 5)
