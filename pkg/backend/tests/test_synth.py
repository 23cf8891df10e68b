"""
Tests for synthetic fog, depth presets and seeded corpora.
"""

import math

import numpy as np
import pytest

from dualhaze.core.errors import DimensionMismatchError, ValidationError
from dualhaze.core.image import ImageF
from dualhaze.domain.dehaze import AtmosphericLight, PatchSpec, dark_channel
from dualhaze.domain.synth import (
    DepthField,
    FogSpec,
    depth_presets,
    depth_to_transmission,
    perturbation_field,
    synth_corpus,
    synth_fog,
    synth_scene,
)


class TestDepthToTransmission:
    def test_zero_beta_is_clear(self):
        t = depth_to_transmission(DepthField(np.full((4, 4), 3.0)), 0.0)
        np.testing.assert_array_equal(t.data, 1.0)

    def test_half_at_ln2(self):
        t = depth_to_transmission(DepthField(np.ones((2, 2))), math.log(2.0))
        np.testing.assert_allclose(t.data, 0.5)

    def test_monotone_in_depth(self):
        d = DepthField(np.linspace(0.0, 4.0, 20).reshape(4, 5))
        t = depth_to_transmission(d, 1.3).data.ravel()
        assert np.all(np.diff(t) <= 0.0)

    def test_negative_depth_rejected(self):
        with pytest.raises(ValidationError):
            DepthField(np.full((2, 2), -0.1))


class TestPerturbationField:
    """Smooth multiplicative value noise."""

    def test_zero_amplitude_is_ones(self):
        np.testing.assert_array_equal(perturbation_field((8, 8), 0.0, 16.0, 1), 1.0)

    def test_mean_and_smoothness(self):
        amp, scale = 0.2, 16.0
        field = perturbation_field((96, 96), amp, scale, seed=4)
        assert abs(field.mean() - 1.0) < 0.01
        bound = amp * 4.0 / scale
        assert np.abs(np.diff(field, axis=0)).max() < bound
        assert np.abs(np.diff(field, axis=1)).max() < bound

    def test_seeded(self):
        a = perturbation_field((32, 32), 0.1, 8.0, seed=9)
        b = perturbation_field((32, 32), 0.1, 8.0, seed=9)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, perturbation_field((32, 32), 0.1, 8.0, seed=10))


class TestSynthFog:
    """Perturbed Koschmieder degradation."""

    def test_no_fog_leaves_scene(self, rgb_image):
        d = DepthField(np.ones((rgb_image.height, rgb_image.width)))
        hazy, t = synth_fog(rgb_image, d, FogSpec(beta=0.0, perturb_amp=0.0))
        np.testing.assert_allclose(hazy.data, rgb_image.data, atol=1e-15)
        np.testing.assert_array_equal(t.data, 1.0)

    def test_deep_scene_becomes_airlight(self, rgb_image):
        d = DepthField(np.full((rgb_image.height, rgb_image.width), 100.0))
        airlight = AtmosphericLight(rgb=(0.8, 0.9, 1.0))
        hazy, _ = synth_fog(rgb_image, d, FogSpec(beta=1.0, airlight=airlight))
        np.testing.assert_allclose(hazy.data, airlight.as_array(3) * np.ones_like(rgb_image.data), atol=1e-5)

    def test_triple_satisfies_haze_model(self, dark_scene):
        scene = dark_scene(40, 40)
        d = depth_presets("corridor", 40, 40)
        spec = FogSpec(beta=1.4, airlight=AtmosphericLight(rgb=(0.95, 0.95, 1.0)), perturb_amp=0.2, seed=3)
        hazy, t = synth_fog(scene, d, spec)
        expected = t.data * scene.data + (1.0 - t.data) * spec.airlight.as_array(3)
        np.testing.assert_allclose(hazy.data, expected, atol=1e-9)
        assert t.data.min() > 0.0 and t.data.max() <= 1.0

    def test_grid_mismatch(self, rgb_image):
        with pytest.raises(DimensionMismatchError):
            synth_fog(rgb_image, DepthField(np.ones((3, 3))))

    def test_spec_ranges(self):
        with pytest.raises(ValueError):
            FogSpec(perturb_amp=0.6)
        with pytest.raises(ValueError):
            FogSpec(beta=-1.0)


class TestDepthPresets:
    def test_ramp_bottom_row_is_zero(self):
        d = depth_presets("ramp", 10, 8)
        np.testing.assert_array_equal(d.data[-1], 0.0)
        np.testing.assert_array_equal(d.data[0], 1.0)

    @pytest.mark.parametrize("steps", [2, 3, 5])
    def test_steps_distinct_values(self, steps):
        d = depth_presets("steps", 12, 20, steps)
        assert np.unique(d.data).size == steps
        np.testing.assert_array_equal(d.data[-1], 0.0)

    def test_corridor_peak_at_centre(self):
        d = depth_presets("corridor", 21, 21)
        assert d.data[10, 10] == d.data.max() == 1.0
        assert d.data[0, 0] == 0.0

    def test_unknown_preset(self):
        with pytest.raises(ValidationError):
            depth_presets("tunnel", 4, 4)


class TestCorpus:
    """Seeded synthetic corpora."""

    def test_scene_dark_channel_is_zero(self):
        scene = synth_scene(32, 32, seed=1)
        np.testing.assert_array_equal(dark_channel(scene, PatchSpec(radius=0)).data, 0.0)
        assert isinstance(scene, ImageF)

    def test_corpus_is_seed_deterministic(self):
        a = synth_corpus(3, 24, 24, seed=5)
        b = synth_corpus(3, 24, 24, seed=5)
        assert [s.id for s in a] == ["synth_000", "synth_001", "synth_002"]
        for x, y in zip(a, b, strict=True):
            np.testing.assert_array_equal(x.hazy.data, y.hazy.data)
            np.testing.assert_array_equal(x.transmission.data, y.transmission.data)

    def test_corpus_beta_range(self):
        for sample in synth_corpus(4, 16, 16, seed=2, beta_range=(0.5, 0.7)):
            assert 0.5 <= sample.fog.beta <= 0.7

    def test_corpus_small_height(self):
        assert len(synth_corpus(3, 2, 8, seed=0)) == 3
