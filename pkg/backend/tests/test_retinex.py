"""
Tests for the Retinex lightness estimators.

Sampling estimators are checked on their defining examples and against naive
re-implementations; center/surround estimators against dense convolution.
"""

import math

import numba
import numpy as np
import pytest

from dualhaze.core.errors import ValidationError
from dualhaze.core.filters import gaussian_kernel1d
from dualhaze.core.image import EpsilonPolicy, ImageF, rescale_array
from dualhaze.domain.retinex import (
    PathConfig,
    ScaleBank,
    ScalingFn,
    SprayConfig,
    chain_lightness,
    homomorphic,
    kbr,
    lrsr,
    msr,
    path_retinex,
    rsr,
    ssr,
)
from dualhaze.domain.retinex.kernels import (
    counter_hash,
    hash_prefix,
    hash_step,
    spray_offset,
    spray_point,
    walk_maxima,
)
from dualhaze.domain.retinex.service import homomorphic_raw, kbr_weights, msr_log, scale, ssr_log

FLOOR = 1.0 / 255.0


def _dense_blur(arr: np.ndarray, sigma: float) -> np.ndarray:
    k = gaussian_kernel1d(sigma)
    r = k.size // 2
    kernel2d = np.outer(k, k)
    out = np.empty_like(arr)
    for c in range(arr.shape[0]):
        padded = np.pad(arr[c], r, mode="symmetric")
        for y in range(arr.shape[1]):
            for x in range(arr.shape[2]):
                out[c, y, x] = np.sum(padded[y : y + 2 * r + 1, x : x + 2 * r + 1] * kernel2d)
    return out


def _naive_kbr(img: np.ndarray, omega_sigma: float, window: int) -> np.ndarray:
    weights = kbr_weights(omega_sigma, window)
    half = window // 2
    channels, height, width = img.shape
    out = np.empty_like(img)
    for c in range(channels):
        for y in range(height):
            for x in range(width):
                v = img[c, y, x]
                acc = wsum = 0.0
                for yy in range(max(0, y - half), min(height, y + half + 1)):
                    for xx in range(max(0, x - half), min(width, x + half + 1)):
                        w = weights[yy - y + half, xx - x + half]
                        u = img[c, yy, xx]
                        acc += w * (min(1.0, v / u) if u >= v else 1.0)
                        wsum += w
                out[c, y, x] = acc / wsum
    return out


def _naive_lrsr(img: np.ndarray, n: int, seed: int, k1: int, k2: int) -> np.ndarray:
    """One spray per pixel, then window means over the clipped k1 and k2 windows, one pixel at a time."""
    channels, height, width = img.shape
    intensity = np.maximum(img, FLOOR)
    radius = float((height**2 + width**2) ** 0.5)
    ratio = np.empty_like(intensity)
    for y in range(height):
        for x in range(width):
            peak = intensity[:, y, x].copy()
            for k in range(n):
                yy, xx = spray_point(seed, y * width + x, 0, k, y, x, radius, height, width)
                peak = np.maximum(peak, intensity[:, yy, xx])
            ratio[:, y, x] = intensity[:, y, x] / peak

    def window_mean(arr, c, y, x, half):
        total, count = 0.0, 0
        for yy in range(max(0, y - half), min(height, y + half + 1)):
            for xx in range(max(0, x - half), min(width, x + half + 1)):
                total += arr[c, yy, xx]
                count += 1
        return total / count

    out = np.empty_like(intensity)
    for c in range(channels):
        for y in range(height):
            for x in range(width):
                illumination = window_mean(intensity, c, y, x, k1 // 2) / window_mean(ratio, c, y, x, k2 // 2)
                out[c, y, x] = min(1.0, max(0.0, intensity[c, y, x] / illumination))
    return out


def _spray_expectation(img: np.ndarray, y: int, x: int, n: int, radius: float, grid: int = 1500):
    """Exact mean and variance of I(x) / max(I(x), n spray samples) by integrating (u, theta)."""
    height, width = img.shape
    u = (np.arange(grid) + 0.5) / grid
    theta = 2.0 * np.pi * (np.arange(grid) + 0.5) / grid
    uu, tt = np.meshgrid(u, theta, indexing="ij")
    r = radius * uu
    yy = np.clip(np.floor(y + r * np.sin(tt) + 0.5), 0, height - 1).astype(int)
    xx = np.clip(np.floor(x + r * np.cos(tt) + 0.5), 0, width - 1).astype(int)
    values = img[yy, xx].ravel()
    levels = np.unique(np.concatenate([values, [img[y, x]]]))
    cdf = np.array([np.mean(values <= m) for m in levels])
    v = img[y, x]
    p_max = np.diff(np.concatenate([[0.0], cdf**n]))
    ratios = v / np.maximum(v, levels)
    mean = float(np.sum(p_max * ratios))
    var = float(np.sum(p_max * ratios**2) - mean**2)
    return mean, var


class TestScaling:
    """Scaling function f."""

    def test_identity_saturates_above_one(self):
        assert scale(0.3) == 0.3
        assert scale(2.0) == 1.0

    def test_logarithm_endpoints(self):
        eps = EpsilonPolicy(floor=FLOOR)
        assert scale(1.0, ScalingFn.LOGARITHM, eps) == pytest.approx(1.0)
        assert scale(FLOOR, ScalingFn.LOGARITHM, eps) == pytest.approx(0.0, abs=1e-12)
        assert scale(0.5, ScalingFn.LOGARITHM, eps) < scale(0.6, ScalingFn.LOGARITHM, eps)


class TestChainLightness:
    """Ratio chain with reset along an explicit path."""

    def test_two_step_path(self):
        assert chain_lightness([0.5, 0.25]) == pytest.approx(0.5)

    def test_reset_at_brighter_pixel(self):
        assert chain_lightness([0.2, 0.8, 0.4]) == pytest.approx(0.5)

    def test_equals_last_over_max(self, rng):
        values = list(rng.uniform(0.05, 1.0, size=30))
        assert chain_lightness(values) == pytest.approx(values[-1] / max(values))

    def test_rejects_empty_and_non_positive(self):
        with pytest.raises(ValidationError):
            chain_lightness([])
        with pytest.raises(ValidationError):
            chain_lightness([0.5, 0.0])


class TestPathRetinex:
    """Path-based Retinex with random walks."""

    def test_constant_image_all_ones(self):
        out = path_retinex(ImageF.constant(0.4, 8, 8), PathConfig(num_paths=5))
        np.testing.assert_allclose(out.data, 1.0)

    def test_long_walk_reaches_brighter_neighbour(self):
        img = ImageF(np.array([[[0.5, 0.25]]]))
        out = path_retinex(img, PathConfig(num_paths=4, path_length=200, seed=3))
        np.testing.assert_allclose(out.data, [[[1.0, 0.5]]])

    def test_walk_stays_inside_image(self):
        img = np.random.default_rng(0).uniform(0.1, 1.0, size=(2, 3, 5))
        maxes = np.empty(2)
        for y in range(3):
            for x in range(5):
                walk_maxima(img, y, x, 0, 2000, 1, maxes)
                np.testing.assert_array_equal(maxes, img.reshape(2, -1).max(axis=1))

    def test_deterministic_for_seed(self, random_image):
        img = random_image(20, 20)
        cfg = PathConfig(num_paths=8, seed=11)
        np.testing.assert_array_equal(path_retinex(img, cfg).data, path_retinex(img, cfg).data)

    def test_seed_changes_output(self, random_image):
        img = random_image(20, 20)
        a = path_retinex(img, PathConfig(num_paths=4, path_length=10, seed=1))
        b = path_retinex(img, PathConfig(num_paths=4, path_length=10, seed=2))
        assert not np.array_equal(a.data, b.data)

    def test_logarithmic_scaling_in_unit_range(self, random_image):
        out = path_retinex(random_image(16, 16), PathConfig(num_paths=6, scaling=ScalingFn.LOGARITHM))
        assert out.data.min() >= 0.0 and out.data.max() <= 1.0


class TestRSR:
    """Random Spray Retinex."""

    def test_constant_image_all_ones(self):
        out = rsr(ImageF.constant(0.6, 10, 10), SprayConfig(samples_per_spray=10, num_sprays=3))
        np.testing.assert_allclose(out.data, 1.0)

    def test_global_max_pixel_is_one(self, random_image):
        img = random_image(16, 16, channels=1)
        y, x = np.unravel_index(np.argmax(img.data[0]), (16, 16))
        out = rsr(img, SprayConfig(samples_per_spray=20, num_sprays=5))
        assert out.data[0, y, x] == pytest.approx(1.0)

    def test_matches_spray_expectation(self):
        plane = np.array([[0.2, 0.9, 0.4], [0.6, 0.3, 0.8], [0.5, 0.7, 0.1]])
        n, sprays, radius = 4, 20_000, 2.0
        out = rsr(ImageF(plane[np.newaxis]), SprayConfig(samples_per_spray=n, num_sprays=sprays, radius=radius, seed=5))
        for y in range(3):
            for x in range(3):
                mean, var = _spray_expectation(plane, y, x, n, radius)
                tol = 4.0 * math.sqrt(var / sprays) + 2e-3
                assert out.data[0, y, x] == pytest.approx(mean, abs=tol)

    def test_thread_count_does_not_change_output(self, random_image):
        img = random_image(24, 24)
        cfg = SprayConfig(samples_per_spray=16, num_sprays=4, seed=9)
        threads = numba.get_num_threads()
        try:
            numba.set_num_threads(1)
            single = rsr(img, cfg)
        finally:
            numba.set_num_threads(threads)
        np.testing.assert_array_equal(single.data, rsr(img, cfg).data)

    def test_hash_prefix_matches_full_hash(self):
        for seed, pixel, spray, sample in [(0, 0, 0, 0), (7, 123, 19, 74), (2**40, 262143, 3, 1)]:
            prefix = hash_prefix(seed, pixel, spray)
            assert hash_step(prefix, sample) == counter_hash(seed, pixel, spray, sample)
            assert spray_offset(prefix, sample, 5, 9, 30.0, 40, 50) == spray_point(
                seed, pixel, spray, sample, 5, 9, 30.0, 40, 50
            )

    def test_kernel_uses_spray_points(self):
        plane = np.full((1, 9, 9), 0.2)
        plane[0, 0, 0] = 1.0
        radius, n = 3.0, 6
        out = rsr(ImageF(plane), SprayConfig(samples_per_spray=n, num_sprays=1, radius=radius, seed=2))
        for y in range(9):
            for x in range(9):
                hits = {spray_point(2, y * 9 + x, 0, k, y, x, radius, 9, 9) for k in range(n)}
                expected = 0.2 if (y, x) != (0, 0) and (0, 0) in hits else 1.0
                assert out.data[0, y, x] == pytest.approx(expected)

    def test_reach_scales_the_diagonal(self):
        assert SprayConfig().radius_for(30, 40) == 50.0
        assert SprayConfig(reach=0.2).radius_for(30, 40) == pytest.approx(10.0)
        assert SprayConfig(radius=3.0, reach=0.2).radius_for(30, 40) == 3.0
        with pytest.raises(ValueError):
            SprayConfig(reach=1.5)

    def test_radius_validated(self):
        with pytest.raises(ValueError):
            SprayConfig(radius=0.0)


class TestLRSR:
    """Light RSR."""

    def test_constant_image_all_ones(self):
        out = lrsr(ImageF.constant(0.3, 12, 12), SprayConfig(samples_per_spray=8), k1=5, k2=5)
        np.testing.assert_allclose(out.data, 1.0, atol=1e-12)

    def test_unit_kernels_reduce_to_single_spray_rsr(self, random_image):
        img = random_image(16, 16)
        cfg = SprayConfig(samples_per_spray=12, num_sprays=1, seed=4)
        np.testing.assert_array_equal(lrsr(img, cfg, k1=1, k2=1).data, rsr(img, cfg).data)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_naive_formula(self, seed):
        img = np.random.default_rng(seed).uniform(size=(3, 16, 16))
        cfg = SprayConfig(samples_per_spray=10, num_sprays=1, seed=seed)
        expected = _naive_lrsr(img, n=10, seed=seed, k1=7, k2=5)
        np.testing.assert_allclose(lrsr(ImageF(img), cfg, k1=7, k2=5).data, expected, atol=1e-9)

    def test_even_kernel_rejected(self, rgb_image):
        with pytest.raises(ValidationError):
            lrsr(rgb_image, k1=4)


class TestKBR:
    """Kernel-Based Retinex."""

    def test_constant_image_all_ones(self):
        np.testing.assert_allclose(kbr(ImageF.constant(0.5, 9, 9), omega_sigma=2.0).data, 1.0, atol=1e-12)

    def test_strict_local_max_is_one(self):
        plane = np.full((5, 5), 0.2)
        plane[2, 2] = 0.9
        out = kbr(ImageF(plane[np.newaxis]), omega_sigma=1.0, window=3)
        assert out.data[0, 2, 2] == pytest.approx(1.0)

    def test_fixed_five_by_five(self):
        plane = np.array(
            [
                [0.1, 0.5, 0.3, 0.8, 0.2],
                [0.6, 0.4, 0.9, 0.1, 0.7],
                [0.3, 0.2, 0.5, 0.6, 0.4],
                [0.8, 0.7, 0.1, 0.3, 0.9],
                [0.2, 0.4, 0.6, 0.5, 0.3],
            ]
        )
        img = ImageF(plane[np.newaxis])
        np.testing.assert_allclose(kbr(img, omega_sigma=1.0, window=3).data, _naive_kbr(img.data, 1.0, 3), atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_brute_force(self, seed):
        data = np.random.default_rng(seed).uniform(0.05, 1.0, size=(3, 10, 10))
        img = ImageF(data)
        np.testing.assert_allclose(kbr(img, omega_sigma=1.5, window=5).data, _naive_kbr(data, 1.5, 5), atol=1e-6)

    def test_default_window_covers_three_sigma(self):
        assert kbr_weights(2.0).shape == (13, 13)


class TestBrightnessMonotonicity:
    """Ratio-domain estimators never darken a pixel."""

    @pytest.mark.parametrize(
        "op",
        [
            lambda img: path_retinex(img, PathConfig(num_paths=4, seed=1)),
            lambda img: rsr(img, SprayConfig(samples_per_spray=20, num_sprays=4, seed=1)),
            lambda img: lrsr(img, SprayConfig(samples_per_spray=20, seed=1), k1=5, k2=5),
            lambda img: kbr(img, omega_sigma=2.0),
        ],
        ids=["path", "rsr", "lrsr", "kbr"],
    )
    def test_output_not_darker(self, op, random_image):
        for _ in range(3):
            img = random_image(24, 24)
            out = op(img)
            assert np.all(out.data >= img.data - 1e-6)
            assert out.data.max() <= 1.0


class TestCenterSurround:
    """SSR, MSR and homomorphic filtering."""

    @pytest.mark.parametrize("op", [ssr, msr, homomorphic], ids=["ssr", "msr", "hf"])
    def test_constant_image_all_ones(self, op):
        np.testing.assert_array_equal(op(ImageF.constant(0.4, 16, 16)).data, 1.0)

    def test_ssr_log_matches_dense_convolution(self, random_image):
        img = random_image(32, 32)
        floored = np.maximum(img.data, FLOOR)
        expected = np.log(floored) - np.log(_dense_blur(floored, 2.0))
        np.testing.assert_allclose(ssr_log(img, sigma=2.0), expected, atol=1e-6)

    def test_homomorphic_matches_dense_convolution(self, random_image):
        img = random_image(32, 32)
        log_i = np.log(np.maximum(img.data, FLOOR))
        expected = np.exp(log_i - _dense_blur(log_i, 2.0))
        np.testing.assert_allclose(homomorphic_raw(img, sigma=2.0), expected, atol=1e-6)

    def test_log_domain_homomorphic_rescales_log_lightness(self, random_image):
        img = random_image(32, 32)
        log_i = np.log(np.maximum(img.data, FLOOR))
        expected = rescale_array(log_i - _dense_blur(log_i, 2.0), 0.01, 0.01)
        np.testing.assert_allclose(homomorphic(img, 2.0, log_domain=True).data, expected, atol=1e-6)

    def test_log_domain_homomorphic_constant_image(self):
        out = homomorphic(ImageF.constant(0.3, 12, 12), 4.0, log_domain=True)
        np.testing.assert_array_equal(out.data, 1.0)

    def test_single_scale_msr_equals_ssr(self, random_image):
        img = random_image(32, 32)
        bank = ScaleBank(sigmas=(10.0,), weights=(1.0,))
        np.testing.assert_allclose(msr(img, bank).data, ssr(img, 10.0).data, atol=1e-12)

    def test_msr_is_weighted_combination(self, random_image):
        img = random_image(64, 64)
        bank = ScaleBank()
        expected = sum(w * ssr_log(img, s) for s, w in zip(bank.sigmas, bank.weights, strict=True))
        np.testing.assert_allclose(msr_log(img, bank), expected, atol=1e-6)

    def test_ssr_flip_equivariant(self, random_image):
        img = random_image(24, 24)
        flipped = ImageF(img.data[:, ::-1, :])
        np.testing.assert_allclose(ssr(flipped, 5.0).data, ssr(img, 5.0).data[:, ::-1, :], atol=1e-9)

    def test_small_sigma_homomorphic_is_flat(self, random_image):
        img = random_image(16, 16)
        np.testing.assert_allclose(homomorphic_raw(img, sigma=0.1), 1.0, atol=1e-9)

    def test_scale_bank_validation(self):
        with pytest.raises(ValueError):
            ScaleBank(sigmas=(15.0, 80.0), weights=(0.5, 0.6))
        with pytest.raises(ValueError):
            ScaleBank(sigmas=(0.0,), weights=(1.0,))
        assert ScaleBank.uniform((1.0, 2.0, 3.0, 4.0)).weights == (0.25, 0.25, 0.25, 0.25)
