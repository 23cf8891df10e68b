"""
Quality report types.
"""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field

REPORT_COLUMNS = ("id", "method", "ssim", "cpsnr", "de00", "e", "r", "sigma")


class Visibility(BaseModel):
    """No-reference visibility change from `before` to `after`."""

    model_config = ConfigDict(frozen=True)

    e: float | None
    r: float = Field(gt=0.0)
    sigma: float = Field(ge=0.0, le=100.0)


class MetricReport(BaseModel):
    """
    All metrics for one processed image. Metrics that could not be computed are None,
    never zero; `error` carries the reason when a whole row failed.
    """

    model_config = ConfigDict(frozen=True)

    id: str
    method: str
    ssim: float | None = Field(default=None, ge=-1.0, le=1.0)
    cpsnr: float | None = None
    de00: float | None = Field(default=None, ge=0.0)
    e: float | None = None
    r: float | None = Field(default=None, gt=0.0)
    sigma: float | None = Field(default=None, ge=0.0, le=100.0)
    error: str | None = None

    def to_row(self) -> dict[str, Any]:
        return {col: getattr(self, col) for col in REPORT_COLUMNS}
