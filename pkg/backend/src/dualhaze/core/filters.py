"""
Shared raster filters.

All filters act on the last two axes of an array, so planar (C, H, W) stacks and
single (H, W) planes are handled alike. Gaussian smoothing is separable with
symmetric ("reflect") padding; box means and sliding extrema use windows that are
truncated at the image border.
"""

import numpy as np
from scipy import ndimage

from dualhaze.core.errors import ErrorCode, ValidationError

GAUSSIAN_TRUNCATE = 3.0


def gaussian_kernel1d(sigma: float, truncate: float = GAUSSIAN_TRUNCATE) -> np.ndarray:
    """Normalised 1-D Gaussian taps on [-r, r], r = int(truncate * sigma + 0.5)."""
    if sigma <= 0.0:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"Gaussian sigma must be positive, got {sigma}",
        )
    radius = int(truncate * sigma + 0.5)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-0.5 * (x / sigma) ** 2)
    return weights / weights.sum()


def gaussian_blur(arr: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian convolution over the last two axes."""
    kernel = gaussian_kernel1d(sigma)
    out = ndimage.correlate1d(np.asarray(arr, dtype=np.float64), kernel, axis=-1, mode="reflect")
    return ndimage.correlate1d(out, kernel, axis=-2, mode="reflect")


def _box_sum_axis(arr: np.ndarray, radius: int, axis: int) -> np.ndarray:
    n = arr.shape[axis]
    csum = np.cumsum(arr, axis=axis)
    pad = [(0, 0)] * arr.ndim
    pad[axis] = (1, 0)
    csum = np.pad(csum, pad)
    idx = np.arange(n)
    hi = np.minimum(idx + radius + 1, n)
    lo = np.maximum(idx - radius, 0)
    return np.take(csum, hi, axis=axis) - np.take(csum, lo, axis=axis)


def box_sum(arr: np.ndarray, radius: int) -> np.ndarray:
    """Sum over the (2r+1)x(2r+1) window clipped to the image, via cumulative sums."""
    out = _box_sum_axis(np.asarray(arr, dtype=np.float64), radius, axis=-1)
    return _box_sum_axis(out, radius, axis=-2)


def box_mean(arr: np.ndarray, radius: int) -> np.ndarray:
    """Mean over the (2r+1)x(2r+1) window clipped to the image."""
    if radius < 0:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"Box radius must be >= 0, got {radius}",
        )
    arr = np.asarray(arr, dtype=np.float64)
    if radius == 0:
        return arr.copy()
    counts = box_sum(np.ones(arr.shape[-2:]), radius)
    return box_sum(arr, radius) / counts


def _window(radius: int) -> tuple[int, int]:
    if radius < 0:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"Window radius must be >= 0, got {radius}",
        )
    return 2 * radius + 1, 2 * radius + 1


def min_filter(plane: np.ndarray, radius: int) -> np.ndarray:
    """Exact sliding-window minimum over a square neighbourhood of radius r."""
    return ndimage.minimum_filter(np.asarray(plane, dtype=np.float64), size=_window(radius), mode="nearest")


def max_filter(plane: np.ndarray, radius: int) -> np.ndarray:
    """Exact sliding-window maximum over a square neighbourhood of radius r."""
    return ndimage.maximum_filter(np.asarray(plane, dtype=np.float64), size=_window(radius), mode="nearest")


def guided_filter(guide: np.ndarray, src: np.ndarray, radius: int, eps: float) -> np.ndarray:
    """
    Edge-preserving smoothing of `src`, locally linear in `guide`.

    For every window w_k: a_k = cov(I, p) / (var(I) + eps), b_k = mean(p) - a_k mean(I);
    the output averages a_k I + b_k over all windows covering a pixel.
    """
    mean_i = box_mean(guide, radius)
    mean_p = box_mean(src, radius)
    cov_ip = box_mean(guide * src, radius) - mean_i * mean_p
    var_i = box_mean(guide * guide, radius) - mean_i * mean_i
    a = cov_ip / (var_i + eps)
    b = mean_p - a * mean_i
    return box_mean(a, radius) * guide + box_mean(b, radius)
