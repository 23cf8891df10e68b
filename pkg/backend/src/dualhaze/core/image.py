"""
Planar floating-point images and the point operations shared by every module.

ImageF stores a read-only float64 array of shape (channels, height, width) with
values in [0, 1]. Hazy inputs, haze-free estimates, Retinex lightness and
inverted images are all ImageF instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from dualhaze.core.config import settings
from dualhaze.core.errors import ErrorCode, ValidationError
from dualhaze.core.validators import RasterValidator

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])
DEGENERATE_RANGE = 1e-6


@dataclass(frozen=True, eq=False)
class ImageF:
    """Immutable planar image with values in [0, 1]."""

    data: np.ndarray
    # set on inverses only, so invert(invert(x)) is x itself
    _inverse: ImageF | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "data", RasterValidator.validate(self.data))

    @property
    def channels(self) -> int:
        return int(self.data.shape[0])

    @property
    def height(self) -> int:
        return int(self.data.shape[1])

    @property
    def width(self) -> int:
        return int(self.data.shape[2])

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.channels, self.height, self.width

    @classmethod
    def from_hwc(cls, arr: np.ndarray) -> ImageF:
        """Build from an interleaved (H, W) or (H, W, C) array."""
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim == 2:
            return cls(arr[np.newaxis, :, :])
        if arr.ndim == 3:
            return cls(np.transpose(arr, (2, 0, 1)))
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"Expected (H, W) or (H, W, C) array, got shape {arr.shape}",
        )

    @classmethod
    def constant(cls, value: float, height: int, width: int, channels: int = 3) -> ImageF:
        return cls(np.full((channels, height, width), float(value)))

    @classmethod
    def clipped(cls, arr: np.ndarray) -> ImageF:
        """Build from an arbitrary finite planar array, clipping to [0, 1]."""
        return cls(np.clip(arr, 0.0, 1.0))

    def to_hwc(self) -> np.ndarray:
        """Interleaved copy: (H, W) for gray images, (H, W, 3) for color."""
        if self.channels == 1:
            return self.data[0].copy()
        return np.ascontiguousarray(np.transpose(self.data, (1, 2, 0)))

    def plane(self, channel: int) -> np.ndarray:
        return self.data[channel]


class EpsilonPolicy(BaseModel):
    """Positive floor applied before any ratio or logarithm."""

    model_config = ConfigDict(frozen=True)

    floor: float = Field(default_factory=lambda: settings.EPS_FLOOR, gt=0.0, lt=0.1)


def invert(img: ImageF) -> ImageF:
    """
    Intensity inversion 1 - I; an exact involution.

    The result keeps a reference to its source, so inverting it again returns
    the source object. The source does not keep its inverse: inverting the same
    image twice computes two equal arrays, and an inverse is freed as soon as
    the caller drops it.
    """
    if img._inverse is not None:
        return img._inverse
    return ImageF(1.0 - img.data, _inverse=img)


def clamp_floor(img: ImageF, eps: EpsilonPolicy | None = None) -> ImageF:
    """Raise every value below the floor to the floor."""
    eps = eps or EpsilonPolicy()
    return ImageF(np.maximum(img.data, eps.floor))


def _check_saturation(p_low: float, p_high: float) -> None:
    if p_low < 0.0 or p_high < 0.0 or p_low + p_high >= 1.0:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"Saturation fractions must satisfy 0 <= p and p_low + p_high < 1, "
            f"got p_low={p_low}, p_high={p_high}",
        )


def rescale_array(arr: np.ndarray, p_low: float = 0.01, p_high: float = 0.01) -> np.ndarray | None:
    """
    Affine map sending the p_low quantile to 0 and the (1 - p_high) quantile to 1.

    Quantiles are taken jointly over every channel. Returns None when the quantile
    range is degenerate so callers can choose their own fallback.
    """
    _check_saturation(p_low, p_high)
    lo, hi = np.quantile(arr, [p_low, 1.0 - p_high])
    if hi - lo < DEGENERATE_RANGE:
        return None
    return np.clip((arr - lo) / (hi - lo), 0.0, 1.0)


def percentile_rescale(img: ImageF, p_low: float = 0.01, p_high: float = 0.01) -> ImageF:
    """Saturate p_low / p_high of the pixels at 0 / 1 and stretch the rest linearly."""
    out = rescale_array(img.data, p_low, p_high)
    if out is None:
        return img
    return ImageF(out)


def hist_equalize(img: ImageF, bins: int = 256) -> ImageF:
    """
    Per-channel histogram equalisation: each pixel maps to the empirical CDF at
    its own value, rounded up to one of `bins` output levels.
    """
    if bins < 2:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"Histogram equalisation needs at least 2 bins, got {bins}",
        )
    out = np.empty_like(img.data)
    for c in range(img.channels):
        plane = img.data[c]
        cdf = np.searchsorted(np.sort(plane, axis=None), plane, side="right") / plane.size
        out[c] = np.ceil(cdf * bins) / bins
    return ImageF(np.clip(out, 0.0, 1.0))


def luma(img: ImageF) -> np.ndarray:
    """Rec. 601 luma as an (H, W) array; gray images are returned as is."""
    if img.channels == 1:
        return img.data[0].copy()
    return np.tensordot(LUMA_WEIGHTS, img.data, axes=(0, 0))
