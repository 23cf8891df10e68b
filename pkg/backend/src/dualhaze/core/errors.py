"""
Error codes and custom exceptions.

Every failure surfaced by the library carries an ErrorCode; the CLI maps the code
family to a process exit status (0 ok, 1 numeric, 2 I/O, 64 usage).
"""

from enum import StrEnum
from typing import Any

import structlog

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_IO = 2
EXIT_USAGE = 64


class ErrorCode(StrEnum):
    """Standardized error codes."""

    # Usage / parse errors (E1xxx)
    USAGE_UNKNOWN_METHOD = "E1001"
    USAGE_UNKNOWN_PARAMETER = "E1002"
    USAGE_INVALID_PARAMETER = "E1003"
    USAGE_BAD_ARGUMENTS = "E1004"
    USAGE_BAD_MANIFEST = "E1005"

    # Image I/O errors (E2xxx)
    IO_NOT_FOUND = "E2001"
    IO_DECODE_FAILED = "E2002"
    IO_ENCODE_FAILED = "E2003"
    IO_UNSUPPORTED_FORMAT = "E2004"
    IO_EMPTY_INPUT = "E2005"

    # Numeric errors (E3xxx)
    NUMERIC_NON_FINITE = "E3001"
    NUMERIC_OUT_OF_RANGE = "E3002"

    # Metric errors (E4xxx)
    METRIC_DIMENSION_MISMATCH = "E4001"
    METRIC_IMAGE_TOO_SMALL = "E4002"

    # General errors (E9xxx)
    VALIDATION_ERROR = "E9001"
    INTERNAL_ERROR = "E9002"


_EXIT_BY_FAMILY = {
    "E1": EXIT_USAGE,
    "E2": EXIT_IO,
    "E3": EXIT_NUMERIC,
    "E4": EXIT_NUMERIC,
    "E9": EXIT_USAGE,
}


class DualHazeError(Exception):
    """Base exception for all dualhaze errors."""

    def __init__(
        self,
        code: ErrorCode,
        message: str,
        details: dict[str, Any] | None = None,
        original_error: Exception | None = None,
    ):
        self.code = code
        self.message = message
        self.details = details or {}
        self.original_error = original_error
        super().__init__(self.message)

    @property
    def exit_status(self) -> int:
        if self.code == ErrorCode.INTERNAL_ERROR:
            return EXIT_NUMERIC
        return _EXIT_BY_FAMILY.get(self.code.value[:2], EXIT_NUMERIC)

    def to_dict(self) -> dict[str, Any]:
        """Convert error to a dictionary for logs and manifests."""
        return {
            "error_code": self.code,
            "message": self.message,
            "details": self.details,
        }


class ValidationError(DualHazeError):
    """Invalid image, parameter or configuration value."""


class MethodParseError(DualHazeError):
    """Malformed method string or parameter override."""


class ImageIOError(DualHazeError):
    """Image or depth file could not be read or written."""


class NumericError(DualHazeError):
    """A computation produced non-finite or out-of-range values."""


class DimensionMismatchError(DualHazeError):
    """Two rasters that must share dimensions do not."""
