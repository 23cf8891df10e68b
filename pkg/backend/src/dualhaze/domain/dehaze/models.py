"""
Types of the haze formation model: transmission, atmospheric light, patches.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from dualhaze.core.config import settings
from dualhaze.core.errors import ErrorCode, ValidationError
from dualhaze.core.image import ImageF


class PatchSpec(BaseModel):
    """Square neighbourhood of side 2r + 1 around each pixel."""

    model_config = ConfigDict(frozen=True)

    radius: int = Field(default=7, ge=0)

    @property
    def side(self) -> int:
        return 2 * self.radius + 1


class AtmosphericLight(BaseModel):
    """Global airlight colour A, each component in (0, 1]."""

    model_config = ConfigDict(frozen=True)

    rgb: tuple[float, float, float]

    @field_validator("rgb")
    @classmethod
    def validate_components(cls, v: tuple[float, float, float]) -> tuple[float, float, float]:
        if any(not (0.0 < c <= 1.0) for c in v):
            raise ValueError(f"airlight components must lie in (0, 1], got {v}")
        return v

    @classmethod
    def white(cls) -> AtmosphericLight:
        return cls(rgb=(1.0, 1.0, 1.0))

    @classmethod
    def gray(cls, value: float) -> AtmosphericLight:
        return cls(rgb=(value, value, value))

    def as_array(self, channels: int = 3) -> np.ndarray:
        """Broadcastable (channels, 1, 1) array; gray images use the mean component."""
        if channels == 1:
            return np.full((1, 1, 1), float(np.mean(self.rgb)))
        return np.asarray(self.rgb, dtype=np.float64).reshape(3, 1, 1)


@dataclass(frozen=True, eq=False)
class TransmissionMap:
    """
    Single-channel transmission t(x) in [0, 1].

    Estimators store values already clamped to [t_min, 1]; synthetic ground truth is
    stored as generated and clamped only when a consumer divides by it.
    """

    data: np.ndarray
    t_min: float = field(default_factory=lambda: settings.T_MIN)

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim == 3 and arr.shape[0] == 1:
            arr = arr[0]
        if arr.ndim != 2 or arr.size == 0:
            raise ValidationError(
                code=ErrorCode.VALIDATION_ERROR,
                message=f"Transmission must be a non-empty (H, W) array, got shape {arr.shape}",
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError(code=ErrorCode.NUMERIC_NON_FINITE, message="Transmission contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValidationError(
                code=ErrorCode.NUMERIC_OUT_OF_RANGE,
                message=f"Transmission must lie in [0, 1], got [{arr.min()}, {arr.max()}]",
            )
        if not 0.0 <= self.t_min < 1.0:
            raise ValidationError(
                code=ErrorCode.VALIDATION_ERROR,
                message=f"t_min must lie in [0, 1), got {self.t_min}",
            )
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @classmethod
    def clamped_from(cls, arr: np.ndarray, t_min: float | None = None) -> TransmissionMap:
        t_min = settings.T_MIN if t_min is None else t_min
        return cls(np.clip(arr, t_min, 1.0), t_min=t_min)

    @classmethod
    def constant(cls, value: float, height: int, width: int, t_min: float | None = None) -> TransmissionMap:
        t_min = settings.T_MIN if t_min is None else t_min
        return cls(np.full((height, width), float(value)), t_min=t_min)

    def clamped(self) -> np.ndarray:
        """Values clamped to [t_min, 1], ready for division."""
        return np.clip(self.data, self.t_min, 1.0)

    def as_image(self) -> ImageF:
        return ImageF(self.data[np.newaxis, :, :])
