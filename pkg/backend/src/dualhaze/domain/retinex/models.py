"""
Parameter models for the Retinex lightness estimators.
"""

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ScalingFn(StrEnum):
    """Non-decreasing scaling f applied to each ratio; f(r) = 1 for r > 1."""

    IDENTITY = "identity"
    LOGARITHM = "logarithm"


class PathConfig(BaseModel):
    """Random-walk paths for path-based Retinex. length=None means 2 * (W + H)."""

    model_config = ConfigDict(frozen=True)

    num_paths: int = Field(default=50, ge=1)
    path_length: int | None = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    scaling: ScalingFn = ScalingFn.IDENTITY

    def length_for(self, height: int, width: int) -> int:
        return self.path_length if self.path_length is not None else 2 * (width + height)


class SprayConfig(BaseModel):
    """
    Random sprays: n samples each, N sprays per pixel. radius=None means `reach`
    times the image diagonal, the whole diagonal by default.
    """

    model_config = ConfigDict(frozen=True)

    samples_per_spray: int = Field(default=75, ge=1)
    num_sprays: int = Field(default=20, ge=1)
    radius: float | None = Field(default=None, gt=0.0)
    reach: float = Field(default=1.0, gt=0.0, le=1.0)
    seed: int = Field(default=0, ge=0, lt=2**64)

    def radius_for(self, height: int, width: int) -> float:
        if self.radius is not None:
            return float(self.radius)
        return self.reach * float((height**2 + width**2) ** 0.5)


class ScaleBank(BaseModel):
    """Gaussian surround scales and their weights for multi-scale Retinex."""

    model_config = ConfigDict(frozen=True)

    sigmas: tuple[float, ...] = (15.0, 80.0, 250.0)
    weights: tuple[float, ...] = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)

    @model_validator(mode="after")
    def _check_bank(self) -> "ScaleBank":
        if not self.sigmas:
            raise ValueError("ScaleBank needs at least one scale")
        if len(self.sigmas) != len(self.weights):
            raise ValueError("sigmas and weights must have the same length")
        if any(s <= 0.0 for s in self.sigmas):
            raise ValueError("sigmas must be strictly positive")
        if any(w <= 0.0 for w in self.weights):
            raise ValueError("weights must be strictly positive")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)}")
        return self

    @classmethod
    def uniform(cls, sigmas: tuple[float, ...]) -> "ScaleBank":
        return cls(sigmas=sigmas, weights=tuple(1.0 / len(sigmas) for _ in sigmas))
