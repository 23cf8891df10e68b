"""
Full-reference (SSIM, CPSNR, CIEDE2000) and no-reference visibility metrics.
"""

import math

import numpy as np
import structlog
from scipy import ndimage
from skimage.color import deltaE_ciede2000, rgb2lab
from skimage.metrics import structural_similarity

from dualhaze.core import filters
from dualhaze.core.config import settings
from dualhaze.core.errors import DimensionMismatchError, DualHazeError, ErrorCode
from dualhaze.core.image import ImageF, luma
from dualhaze.core.validators import ensure_same_shape
from dualhaze.domain.metrics.models import MetricReport, Visibility

logger = structlog.get_logger(__name__)

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
VISIBLE_CONTRAST = 0.05
SATURATION_TOL = 1e-9


def ssim(a: ImageF, b: ImageF) -> float:
    """Mean SSIM on luma, 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, range 1."""
    ensure_same_shape(a.data, b.data)
    if min(a.height, a.width) < SSIM_WINDOW:
        raise DimensionMismatchError(
            code=ErrorCode.METRIC_IMAGE_TOO_SMALL,
            message=f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {a.height}x{a.width}",
        )
    score = float(
        structural_similarity(
            luma(a),
            luma(b),
            gaussian_weights=True,
            sigma=SSIM_SIGMA,
            use_sample_covariance=False,
            data_range=1.0,
            K1=0.01,
            K2=0.03,
        )
    )
    return min(1.0, max(-1.0, score))


def cpsnr(a: ImageF, b: ImageF) -> float:
    """10 log10(1 / MSE) with MSE pooled over all channels, capped."""
    ensure_same_shape(a.data, b.data)
    mse = float(np.mean((a.data - b.data) ** 2))
    if mse == 0.0:
        return settings.CPSNR_CAP_DB
    return min(settings.CPSNR_CAP_DB, 10.0 * math.log10(1.0 / mse))


def _rgb(img: ImageF) -> np.ndarray:
    hwc = img.to_hwc()
    if img.channels == 1:
        return np.repeat(hwc[:, :, np.newaxis], 3, axis=2)
    return hwc


def ciede2000(lab_a: np.ndarray, lab_b: np.ndarray) -> np.ndarray:
    """Per-triple CIEDE2000 difference of CIELAB arrays shaped (..., 3)."""
    return np.asarray(deltaE_ciede2000(np.asarray(lab_a, dtype=np.float64), np.asarray(lab_b, dtype=np.float64)))


def de00(a: ImageF, b: ImageF) -> float:
    """Mean CIEDE2000 after sRGB (D65, 2 degree observer) to CIELAB conversion."""
    ensure_same_shape(a.data, b.data)
    lab_a = rgb2lab(_rgb(a), illuminant="D65", observer="2")
    lab_b = rgb2lab(_rgb(b), illuminant="D65", observer="2")
    return float(np.mean(ciede2000(lab_a, lab_b)))


def _gradient(gray: np.ndarray) -> np.ndarray:
    gy = ndimage.sobel(gray, axis=0, mode="nearest")
    gx = ndimage.sobel(gray, axis=1, mode="nearest")
    return np.hypot(gx, gy)


def _visible_edges(gray: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Gradient pixels whose 3x3 Michelson contrast exceeds the visibility threshold."""
    hi = filters.max_filter(gray, 1)
    lo = filters.min_filter(gray, 1)
    total = hi + lo
    contrast = np.divide(hi - lo, total, out=np.zeros_like(total), where=total > 0)
    return (grad > 0) & (contrast > VISIBLE_CONTRAST)


def _saturated(gray: np.ndarray) -> np.ndarray:
    return (gray <= SATURATION_TOL) | (gray >= 1.0 - SATURATION_TOL)


def visibility_metrics(before: ImageF, after: ImageF) -> Visibility:
    """
    e: relative change in the number of visible edges (None if `before` has none).
    r: geometric mean of gradient ratios after/before over the visible edges of `after`.
    sigma: percentage of pixels black or white in `after` but not in `before`.
    """
    ensure_same_shape(before.data, after.data)
    gray_b, gray_a = luma(before), luma(after)
    grad_b, grad_a = _gradient(gray_b), _gradient(gray_a)
    vis_b = _visible_edges(gray_b, grad_b)
    vis_a = _visible_edges(gray_a, grad_a)

    n_before, n_after = int(vis_b.sum()), int(vis_a.sum())
    e = (n_after - n_before) / n_before if n_before > 0 else None

    mask = vis_a & (grad_b > 0)
    r = float(np.exp(np.mean(np.log(grad_a[mask] / grad_b[mask])))) if mask.any() else 1.0

    new_saturated = _saturated(gray_a) & ~_saturated(gray_b)
    sigma = 100.0 * float(new_saturated.mean())
    return Visibility(e=e, r=r, sigma=sigma)


def evaluate_pair(
    image_id: str,
    method: str,
    before: ImageF,
    after: ImageF,
    reference: ImageF | None = None,
) -> MetricReport:
    """
    All metrics for one output. Full-reference metrics need `reference`; a failing
    metric leaves its field absent and flags the row instead of raising.
    """
    values: dict[str, float | None] = {}
    errors: list[str] = []

    if reference is not None:
        for name, metric in (("ssim", ssim), ("cpsnr", cpsnr), ("de00", de00)):
            try:
                values[name] = metric(after, reference)
            except DualHazeError as e:
                errors.append(f"{name}: {e.code.value} {e.message}")

    try:
        vis = visibility_metrics(before, after)
        values.update(e=vis.e, r=vis.r, sigma=vis.sigma)
    except DualHazeError as e:
        errors.append(f"visibility: {e.code.value} {e.message}")

    if errors:
        logger.warning("metric_row_failed", id=image_id, method=method, errors=errors)
    return MetricReport(id=image_id, method=method, error="; ".join(errors) or None, **values)
