"""
Synthetic fog types.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from dualhaze.core.errors import ErrorCode, ValidationError
from dualhaze.core.image import ImageF
from dualhaze.domain.dehaze.models import AtmosphericLight, TransmissionMap


class DepthPreset(StrEnum):
    RAMP = "ramp"
    CORRIDOR = "corridor"
    STEPS = "steps"


@dataclass(frozen=True, eq=False)
class DepthField:
    """Relative scene depth, finite and non-negative, shape (H, W)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.size == 0:
            raise ValidationError(
                code=ErrorCode.VALIDATION_ERROR,
                message=f"Depth must be a non-empty (H, W) array, got shape {arr.shape}",
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError(code=ErrorCode.NUMERIC_NON_FINITE, message="Depth contains non-finite values")
        if arr.min() < 0.0:
            raise ValidationError(
                code=ErrorCode.NUMERIC_OUT_OF_RANGE,
                message=f"Depth must be non-negative, got minimum {arr.min()}",
            )
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])


class FogSpec(BaseModel):
    """Extinction, airlight and the smooth multiplicative perturbation of t."""

    model_config = ConfigDict(frozen=True)

    beta: float = Field(default=1.0, ge=0.0)
    airlight: AtmosphericLight = Field(default_factory=AtmosphericLight.white)
    perturb_amp: float = Field(default=0.1, ge=0.0, le=0.5)
    perturb_scale: float = Field(default=32.0, gt=0.0)
    seed: int = Field(default=0, ge=0)


@dataclass(frozen=True, eq=False)
class SynthSample:
    """One generated (ground truth, hazy, transmission) triple."""

    id: str
    ground_truth: ImageF
    hazy: ImageF
    transmission: TransmissionMap
    depth: DepthField
    fog: FogSpec
