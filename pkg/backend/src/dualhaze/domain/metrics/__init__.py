from dualhaze.domain.metrics.models import REPORT_COLUMNS, MetricReport, Visibility
from dualhaze.domain.metrics.service import (
    ciede2000,
    cpsnr,
    de00,
    evaluate_pair,
    ssim,
    visibility_metrics,
)

__all__ = [
    "REPORT_COLUMNS",
    "MetricReport",
    "Visibility",
    "ciede2000",
    "cpsnr",
    "de00",
    "evaluate_pair",
    "ssim",
    "visibility_metrics",
]
