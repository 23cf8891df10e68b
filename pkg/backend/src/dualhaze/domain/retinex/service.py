"""
Retinex lightness estimators.

Sampling-based estimators (paths, sprays, kernel weights) compare each pixel with
the brightest value it sees; center/surround estimators (SSR, MSR, homomorphic
filtering) work in the log domain and are mapped back to [0, 1] by one percentile
rescale. Every channel is processed independently.
"""

import math
import time
from collections.abc import Sequence
from itertools import pairwise

import numpy as np
import structlog

from dualhaze.core.errors import ErrorCode, ValidationError
from dualhaze.core.filters import box_mean, gaussian_blur
from dualhaze.core.image import EpsilonPolicy, ImageF, clamp_floor, rescale_array
from dualhaze.domain.retinex.kernels import (
    kernel_lightness_kernel,
    path_lightness_kernel,
    spray_lightness_kernel,
)
from dualhaze.domain.retinex.models import PathConfig, ScaleBank, ScalingFn, SprayConfig

logger = structlog.get_logger(__name__)

SATURATION = 0.01


def _log_norm(eps: EpsilonPolicy) -> float:
    return math.log(1.0 / eps.floor)


def scale(ratio: float, f: ScalingFn = ScalingFn.IDENTITY, eps: EpsilonPolicy | None = None) -> float:
    """Scalar form of the scaling function f, with f(r) = 1 for r > 1."""
    if ratio > 1.0:
        return 1.0
    if f is ScalingFn.LOGARITHM:
        eps = eps or EpsilonPolicy()
        return max(0.0, 1.0 + math.log(ratio) / _log_norm(eps))
    return ratio


def chain_lightness(values: Sequence[float]) -> float:
    """
    Ratio chain with reset along an explicit path ending at the last value.

    Successive ratios are multiplied; whenever the running product exceeds 1 the
    chain restarts from the current pixel. For positive inputs the result is
    last / max(values).
    """
    if not values:
        raise ValidationError(code=ErrorCode.VALIDATION_ERROR, message="Path must contain at least one value")
    if min(values) <= 0.0:
        raise ValidationError(code=ErrorCode.VALIDATION_ERROR, message="Path values must be positive")
    product = 1.0
    for prev, cur in pairwise(values):
        product = min(1.0, product * cur / prev)
    return product


def path_retinex(img: ImageF, cfg: PathConfig | None = None, eps: EpsilonPolicy | None = None) -> ImageF:
    """Mean over N random walks of f(I(x) / max of I along the walk)."""
    cfg = cfg or PathConfig()
    eps = eps or EpsilonPolicy()
    floored = clamp_floor(img, eps)
    length = cfg.length_for(img.height, img.width)
    started = time.perf_counter()
    out = path_lightness_kernel(
        np.ascontiguousarray(floored.data),
        cfg.num_paths,
        length,
        np.uint64(cfg.seed),
        cfg.scaling is ScalingFn.LOGARITHM,
        _log_norm(eps),
    )
    logger.debug(
        "path_retinex_done",
        num_paths=cfg.num_paths,
        path_length=length,
        elapsed_s=round(time.perf_counter() - started, 4),
    )
    return ImageF.clipped(out)


def _spray_lightness(img: ImageF, cfg: SprayConfig, eps: EpsilonPolicy) -> np.ndarray:
    floored = clamp_floor(img, eps)
    return spray_lightness_kernel(
        np.ascontiguousarray(floored.data),
        cfg.samples_per_spray,
        cfg.num_sprays,
        cfg.radius_for(img.height, img.width),
        np.uint64(cfg.seed),
    )


def rsr(img: ImageF, cfg: SprayConfig | None = None, eps: EpsilonPolicy | None = None) -> ImageF:
    """Random Spray Retinex: mean over N sprays of I(x) / max over the spray."""
    cfg = cfg or SprayConfig()
    started = time.perf_counter()
    out = _spray_lightness(img, cfg, eps or EpsilonPolicy())
    logger.debug(
        "rsr_done",
        samples_per_spray=cfg.samples_per_spray,
        num_sprays=cfg.num_sprays,
        elapsed_s=round(time.perf_counter() - started, 4),
    )
    return ImageF.clipped(out)


def _odd_radius(k: int, name: str) -> int:
    if k < 1 or k % 2 == 0:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"{name} must be a positive odd kernel size, got {k}",
        )
    return k // 2


def lrsr(
    img: ImageF,
    cfg: SprayConfig | None = None,
    k1: int = 25,
    k2: int = 25,
    eps: EpsilonPolicy | None = None,
) -> ImageF:
    """
    Light RSR.

    One spray per pixel gives a ratio image R = I / local max. The illumination is
    box_k1(I) / box_k2(R) and the lightness I / illumination, clipped to [0, 1].
    Kernel sizes of 1 skip the smoothing, which reduces LRSR to one-spray RSR.
    """
    cfg = cfg or SprayConfig(num_sprays=1)
    if cfg.num_sprays != 1:
        cfg = cfg.model_copy(update={"num_sprays": 1})
    r1, r2 = _odd_radius(k1, "k1"), _odd_radius(k2, "k2")
    eps = eps or EpsilonPolicy()
    ratio = _spray_lightness(img, cfg, eps)
    if r1 == 0 and r2 == 0:
        return ImageF.clipped(ratio)
    intensity = clamp_floor(img, eps).data
    out = intensity * box_mean(ratio, r2) / box_mean(intensity, r1)
    return ImageF.clipped(out)


def kbr_weights(omega_sigma: float, window: int | None = None) -> np.ndarray:
    """Unnormalised truncated Gaussian weights on a square odd-sided window."""
    if omega_sigma <= 0.0:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"omega_sigma must be positive, got {omega_sigma}",
        )
    if window is None:
        window = 2 * math.ceil(3.0 * omega_sigma) + 1
    half = _odd_radius(window, "window")
    d = np.arange(-half, half + 1, dtype=np.float64)
    return np.exp(-(d[:, None] ** 2 + d[None, :] ** 2) / (2.0 * omega_sigma**2))


def kbr(
    img: ImageF,
    omega_sigma: float = 5.0,
    window: int | None = None,
    f: ScalingFn = ScalingFn.IDENTITY,
    eps: EpsilonPolicy | None = None,
) -> ImageF:
    """Kernel-Based Retinex with a truncated Gaussian selection kernel."""
    eps = eps or EpsilonPolicy()
    weights = kbr_weights(omega_sigma, window)
    floored = clamp_floor(img, eps)
    out = kernel_lightness_kernel(
        np.ascontiguousarray(floored.data),
        weights,
        f is ScalingFn.LOGARITHM,
        _log_norm(eps),
    )
    return ImageF.clipped(out)


def _to_unit(raw: np.ndarray, img: ImageF) -> ImageF:
    """One percentile rescale; a degenerate log-output maps to the all-ones image."""
    out = rescale_array(raw, SATURATION, SATURATION)
    if out is None:
        return ImageF.constant(1.0, img.height, img.width, img.channels)
    return ImageF(out)


def ssr_log(img: ImageF, sigma: float = 80.0, eps: EpsilonPolicy | None = None) -> np.ndarray:
    """Raw single-scale log-lightness log I - log(G_sigma * I)."""
    floored = clamp_floor(img, eps).data
    return np.log(floored) - np.log(gaussian_blur(floored, sigma))


def msr_log(img: ImageF, bank: ScaleBank | None = None, eps: EpsilonPolicy | None = None) -> np.ndarray:
    """Weighted sum of raw single-scale log outputs."""
    bank = bank or ScaleBank()
    floored = clamp_floor(img, eps).data
    log_i = np.log(floored)
    out = np.zeros_like(floored)
    for sigma, weight in zip(bank.sigmas, bank.weights, strict=True):
        out += weight * (log_i - np.log(gaussian_blur(floored, sigma)))
    return out


def homomorphic_log(img: ImageF, sigma: float = 80.0, eps: EpsilonPolicy | None = None) -> np.ndarray:
    """Log-domain lightness log I - G_sigma * log I: the surround is taken after the logarithm."""
    log_i = np.log(clamp_floor(img, eps).data)
    return log_i - gaussian_blur(log_i, sigma)


def homomorphic_raw(img: ImageF, sigma: float = 80.0, eps: EpsilonPolicy | None = None) -> np.ndarray:
    """exp(log I - G_sigma * log I)."""
    return np.exp(homomorphic_log(img, sigma, eps))


def ssr(img: ImageF, sigma: float = 80.0, eps: EpsilonPolicy | None = None) -> ImageF:
    return _to_unit(ssr_log(img, sigma, eps), img)


def msr(img: ImageF, bank: ScaleBank | None = None, eps: EpsilonPolicy | None = None) -> ImageF:
    return _to_unit(msr_log(img, bank, eps), img)


def homomorphic(
    img: ImageF,
    sigma: float = 80.0,
    eps: EpsilonPolicy | None = None,
    log_domain: bool = False,
) -> ImageF:
    """
    Homomorphic filtering. The percentile rescale is applied to exp(log I - G * log I),
    or with log_domain=True to the log-domain lightness itself, as for SSR and MSR.
    """
    raw = homomorphic_log(img, sigma, eps) if log_domain else homomorphic_raw(img, sigma, eps)
    return _to_unit(raw, img)
