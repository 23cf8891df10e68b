"""
Koschmieder haze model and Dark Channel Prior dehazing.
"""

import math
import time

import numpy as np
import structlog

from dualhaze.core.errors import ErrorCode, ValidationError
from dualhaze.core.filters import guided_filter, min_filter
from dualhaze.core.image import EpsilonPolicy, ImageF, luma
from dualhaze.core.validators import ensure_same_grid
from dualhaze.domain.dehaze.models import AtmosphericLight, PatchSpec, TransmissionMap

logger = structlog.get_logger(__name__)

DEFAULT_TOP_FRACTION = 0.001
DEFAULT_REFINE_RADIUS = 20
DEFAULT_REFINE_REG = 1e-3


def _dark(planes: np.ndarray, patch: PatchSpec) -> np.ndarray:
    return min_filter(planes.min(axis=0), patch.radius)


def dark_channel(img: ImageF, patch: PatchSpec | None = None) -> ImageF:
    """min over channels of the min over the patch around each pixel."""
    patch = patch or PatchSpec()
    return ImageF(_dark(img.data, patch)[np.newaxis, :, :])


def estimate_airlight(
    img: ImageF,
    patch: PatchSpec | None = None,
    top_fraction: float = DEFAULT_TOP_FRACTION,
    eps: EpsilonPolicy | None = None,
) -> AtmosphericLight:
    """
    Brightest input pixel (by channel sum) among the top_fraction of dark-channel values.

    Ranking ties go to the lower pixel index. Components are floored so that an
    all-black image yields (floor, floor, floor).
    """
    if not 0.0 < top_fraction <= 1.0:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"top_fraction must lie in (0, 1], got {top_fraction}",
        )
    patch = patch or PatchSpec()
    eps = eps or EpsilonPolicy()
    dark = _dark(img.data, patch).ravel()
    n = dark.size
    count = max(1, math.floor(n * top_fraction))
    index = np.arange(n)
    order = np.lexsort((index, -dark))[:count]
    sums = img.data.sum(axis=0).ravel()[order]
    best = int(order[sums == sums.max()].min())
    y, x = divmod(best, img.width)
    pixel = img.data[:, y, x]
    if img.channels == 1:
        pixel = np.repeat(pixel, 3)
    rgb = tuple(float(max(v, eps.floor)) for v in pixel)
    logger.debug("airlight_estimated", rgb=rgb, candidates=count, pixel=best)
    return AtmosphericLight(rgb=rgb)  # type: ignore[arg-type]


def estimate_transmission(
    img: ImageF,
    airlight: AtmosphericLight,
    patch: PatchSpec | None = None,
    retain: float = 1.0,
    t_min: float | None = None,
) -> TransmissionMap:
    """t(x) = 1 - retain * min_c min_{y in patch(x)} I^c(y) / A^c, clamped to [t_min, 1]."""
    if not 0.0 < retain <= 1.0:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"retain must lie in (0, 1], got {retain}",
        )
    patch = patch or PatchSpec()
    normalized = img.data / airlight.as_array(img.channels)
    return TransmissionMap.clamped_from(1.0 - retain * _dark(normalized, patch), t_min)


def refine_transmission(
    t: TransmissionMap,
    guide: ImageF,
    radius: int = DEFAULT_REFINE_RADIUS,
    reg: float = DEFAULT_REFINE_REG,
) -> TransmissionMap:
    """Guided-filter refinement of t using the luma of `guide`, clamped to [t_min, 1]."""
    if reg <= 0.0:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"Refinement regularisation must be positive, got {reg}",
        )
    gray = luma(guide)
    ensure_same_grid(gray, t.data, "transmission and guide")
    refined = guided_filter(gray, t.data, radius, reg)
    return TransmissionMap.clamped_from(refined, t.t_min)


def koschmieder_forward(j: ImageF, t: TransmissionMap, airlight: AtmosphericLight) -> ImageF:
    """I(x) = t(x) J(x) + (1 - t(x)) A."""
    ensure_same_grid(j.data, t.data, "scene and transmission")
    a = airlight.as_array(j.channels)
    return ImageF.clipped(t.data * j.data + (1.0 - t.data) * a)


def invert_haze_model(img: ImageF, t: TransmissionMap, airlight: AtmosphericLight) -> ImageF:
    """J(x) = (I(x) - A) / max(t(x), t_min) + A, clipped to [0, 1]."""
    ensure_same_grid(img.data, t.data, "image and transmission")
    a = airlight.as_array(img.channels)
    return ImageF.clipped((img.data - a) / t.clamped() + a)


def dcp_dehaze(
    img: ImageF,
    patch: PatchSpec | None = None,
    retain: float = 1.0,
    refine: bool = False,
    airlight: AtmosphericLight | None = None,
    top_fraction: float = DEFAULT_TOP_FRACTION,
    refine_radius: int = DEFAULT_REFINE_RADIUS,
    refine_reg: float = DEFAULT_REFINE_REG,
    t_min: float | None = None,
) -> ImageF:
    """Dark Channel Prior pipeline: airlight, transmission, optional refinement, inversion."""
    patch = patch or PatchSpec()
    started = time.perf_counter()
    if airlight is None:
        airlight = estimate_airlight(img, patch, top_fraction)
    t = estimate_transmission(img, airlight, patch, retain, t_min)
    if refine:
        t = refine_transmission(t, img, refine_radius, refine_reg)
    out = invert_haze_model(img, t, airlight)
    logger.debug(
        "dcp_dehaze_done",
        patch_radius=patch.radius,
        refine=refine,
        t_mean=round(float(t.data.mean()), 6),
        elapsed_s=round(time.perf_counter() - started, 4),
    )
    return out
