"""
Input validation for rasters and scalar parameters.

Checks run at the boundary between caller input and the numeric code so that the
kernels can assume finite, in-range, correctly shaped arrays.
"""

from typing import Any, TypeVar

import numpy as np
from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from dualhaze.core.errors import DimensionMismatchError, ErrorCode, ValidationError

M = TypeVar("M", bound=BaseModel)


class RasterValidator:
    """Validate planar float rasters of shape (channels, height, width)."""

    ALLOWED_CHANNELS = (1, 3)

    @staticmethod
    def validate(data: Any) -> np.ndarray:
        """Return a contiguous float64 copy of a valid planar raster."""
        try:
            arr = np.array(data, dtype=np.float64, copy=True)
        except (TypeError, ValueError):
            raise ValidationError(
                code=ErrorCode.VALIDATION_ERROR,
                message="Raster data is not numeric",
            ) from None

        if arr.ndim != 3:
            raise ValidationError(
                code=ErrorCode.VALIDATION_ERROR,
                message=f"Raster must have shape (channels, height, width), got {arr.shape}",
            )

        channels, height, width = arr.shape
        if channels not in RasterValidator.ALLOWED_CHANNELS:
            raise ValidationError(
                code=ErrorCode.VALIDATION_ERROR,
                message=f"Raster must have 1 or 3 channels, got {channels}",
            )
        if height < 1 or width < 1:
            raise ValidationError(
                code=ErrorCode.VALIDATION_ERROR,
                message=f"Raster must be non-empty, got {height}x{width}",
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError(
                code=ErrorCode.NUMERIC_NON_FINITE,
                message="Raster contains non-finite values",
            )
        lo, hi = float(arr.min()), float(arr.max())
        if lo < 0.0 or hi > 1.0:
            raise ValidationError(
                code=ErrorCode.NUMERIC_OUT_OF_RANGE,
                message=f"Raster values must lie in [0, 1], got [{lo}, {hi}]",
            )
        arr.setflags(write=False)
        return arr


def ensure_same_shape(a: np.ndarray, b: np.ndarray, what: str = "images") -> None:
    """Raise DimensionMismatchError unless both arrays share a shape."""
    if a.shape != b.shape:
        raise DimensionMismatchError(
            code=ErrorCode.METRIC_DIMENSION_MISMATCH,
            message=f"{what} differ in shape: {a.shape} vs {b.shape}",
            details={"left": list(a.shape), "right": list(b.shape)},
        )


def ensure_same_grid(a: np.ndarray, b: np.ndarray, what: str = "rasters") -> None:
    """Raise DimensionMismatchError unless the (height, width) grids agree."""
    if a.shape[-2:] != b.shape[-2:]:
        raise DimensionMismatchError(
            code=ErrorCode.METRIC_DIMENSION_MISMATCH,
            message=f"{what} differ in size: {a.shape[-2:]} vs {b.shape[-2:]}",
            details={"left": list(a.shape[-2:]), "right": list(b.shape[-2:])},
        )


def build_model(model: type[M], **values: Any) -> M:
    """Construct a pydantic parameter model, converting failures to ValidationError."""
    try:
        return model(**values)
    except PydanticValidationError as e:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"Invalid {model.__name__}: {e.errors()[0]['msg']}",
            details={"errors": [str(err["loc"]) for err in e.errors()]},
            original_error=e,
        ) from None
