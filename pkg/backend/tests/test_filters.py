"""
Tests for the shared raster filters against brute-force references.
"""

import numpy as np
import pytest

from dualhaze.core.errors import ValidationError
from dualhaze.core.filters import (
    box_mean,
    gaussian_blur,
    gaussian_kernel1d,
    guided_filter,
    max_filter,
    min_filter,
)


def _naive_window(arr: np.ndarray, radius: int, reduce) -> np.ndarray:
    h, w = arr.shape
    out = np.empty_like(arr)
    for y in range(h):
        for x in range(w):
            window = arr[max(0, y - radius) : y + radius + 1, max(0, x - radius) : x + radius + 1]
            out[y, x] = reduce(window)
    return out


def _naive_guided(guide: np.ndarray, src: np.ndarray, radius: int, eps: float) -> np.ndarray:
    h, w = guide.shape
    a = np.empty_like(guide)
    b = np.empty_like(guide)
    for y in range(h):
        for x in range(w):
            sl = (slice(max(0, y - radius), y + radius + 1), slice(max(0, x - radius), x + radius + 1))
            gi, pi = guide[sl].ravel(), src[sl].ravel()
            var = np.mean(gi * gi) - np.mean(gi) ** 2
            cov = np.mean(gi * pi) - np.mean(gi) * np.mean(pi)
            a[y, x] = cov / (var + eps)
            b[y, x] = np.mean(pi) - a[y, x] * np.mean(gi)
    return _naive_window(a, radius, np.mean) * guide + _naive_window(b, radius, np.mean)


class TestGaussian:
    """Separable Gaussian smoothing."""

    def test_kernel_normalised(self):
        k = gaussian_kernel1d(2.0)
        assert k.size == 2 * int(3 * 2.0 + 0.5) + 1
        assert k.sum() == pytest.approx(1.0, abs=1e-12)

    def test_constant_preserved(self):
        arr = np.full((3, 20, 20), 0.37)
        np.testing.assert_allclose(gaussian_blur(arr, 5.0), arr, atol=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_dense_convolution(self, seed):
        rng = np.random.default_rng(seed)
        arr = rng.uniform(size=(12, 13))
        sigma = 1.5
        k = gaussian_kernel1d(sigma)
        r = k.size // 2
        padded = np.pad(arr, r, mode="symmetric")
        kernel2d = np.outer(k, k)
        expected = np.empty_like(arr)
        for y in range(arr.shape[0]):
            for x in range(arr.shape[1]):
                expected[y, x] = np.sum(padded[y : y + 2 * r + 1, x : x + 2 * r + 1] * kernel2d)
        np.testing.assert_allclose(gaussian_blur(arr, sigma), expected, atol=1e-6)

    def test_flip_equivariant(self, rng):
        arr = rng.uniform(size=(16, 16))
        np.testing.assert_allclose(gaussian_blur(arr[::-1], 3.0), gaussian_blur(arr, 3.0)[::-1], atol=1e-9)

    def test_rejects_non_positive_sigma(self):
        with pytest.raises(ValidationError):
            gaussian_kernel1d(0.0)


class TestWindowFilters:
    """Box mean and sliding extrema over border-truncated windows."""

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("radius", [0, 1, 3])
    def test_min_max_match_brute_force(self, seed, radius):
        arr = np.random.default_rng(seed).uniform(size=(16, 16))
        np.testing.assert_array_equal(min_filter(arr, radius), _naive_window(arr, radius, np.min))
        np.testing.assert_array_equal(max_filter(arr, radius), _naive_window(arr, radius, np.max))

    @pytest.mark.parametrize("radius", [0, 2, 4])
    def test_box_mean_matches_brute_force(self, rng, radius):
        arr = rng.uniform(size=(9, 11))
        np.testing.assert_allclose(box_mean(arr, radius), _naive_window(arr, radius, np.mean), atol=1e-12)

    def test_box_mean_on_stack(self, rng):
        stack = rng.uniform(size=(3, 8, 8))
        out = box_mean(stack, 2)
        for c in range(3):
            np.testing.assert_allclose(out[c], box_mean(stack[c], 2), atol=1e-12)

    def test_negative_radius(self, rng):
        with pytest.raises(ValidationError):
            box_mean(rng.uniform(size=(4, 4)), -1)
        with pytest.raises(ValidationError):
            min_filter(rng.uniform(size=(4, 4)), -1)


class TestGuidedFilter:
    """Guided filter against per-window least squares."""

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_naive(self, seed):
        rng = np.random.default_rng(seed)
        guide = rng.uniform(size=(32, 32))
        src = rng.uniform(size=(32, 32))
        np.testing.assert_allclose(guided_filter(guide, src, 3, 1e-3), _naive_guided(guide, src, 3, 1e-3), atol=1e-6)

    def test_constant_guide_degenerates_to_double_box_mean(self, rng):
        src = rng.uniform(size=(16, 16))
        guide = np.full((16, 16), 0.5)
        np.testing.assert_allclose(guided_filter(guide, src, 2, 1e-3), box_mean(box_mean(src, 2), 2), atol=1e-12)

    def test_self_guidance_with_small_reg(self, rng):
        src = rng.uniform(size=(24, 24))
        np.testing.assert_allclose(guided_filter(src, src, 4, 1e-8), src, atol=1e-3)
