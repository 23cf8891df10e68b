"""
Evaluation engine: run methods over a set of images and tabulate quality metrics.

One report row per (image, method), ordered by input path and then by the order
the methods were given, followed by one aggregate row of means per method.
"""

from concurrent.futures import ThreadPoolExecutor
from itertools import repeat
from pathlib import Path

import numpy as np
import pandas as pd
import structlog

from dualhaze.application.methods import MethodSpec
from dualhaze.core.config import settings
from dualhaze.core.errors import DualHazeError, ErrorCode, ImageIOError
from dualhaze.core.image import ImageF
from dualhaze.domain.metrics import REPORT_COLUMNS, MetricReport, evaluate_pair
from dualhaze.infrastructure import image_io

logger = structlog.get_logger(__name__)

AGGREGATE_ID = "mean"
METRICS = REPORT_COLUMNS[2:]
# True where a larger value is better
HIGHER_IS_BETTER = {"ssim": True, "cpsnr": True, "de00": False, "e": True, "r": True, "sigma": False}


def rank_column(metric: str) -> str:
    return f"rank_{metric}"


class EvaluationEngine:
    """
    Evaluate methods on test images, with optional reference (ground-truth) images
    matched by file stem.
    """

    def __init__(self, methods: list[MethodSpec], seed: int, workers: int | None = None):
        if not methods:
            raise DualHazeError(code=ErrorCode.USAGE_BAD_ARGUMENTS, message="At least one method is required")
        self.methods = methods
        self.seed = seed
        self.workers = workers or settings.MAX_WORKERS
        self._ops = [m.build(seed) for m in methods]

    # ------------------------------------------------------------------
    # Inputs
    # ------------------------------------------------------------------

    @staticmethod
    def pair_references(inputs: list[Path], reference: str | Path | None) -> list[Path | None]:
        """Reference path for each input: same stem in the reference directory, or the file itself."""
        if reference is None:
            return [None] * len(inputs)
        reference = Path(reference)
        if reference.is_file():
            return [reference] * len(inputs)
        by_stem = {p.stem: p for p in image_io.list_images(reference)}
        return [by_stem.get(p.stem) for p in inputs]

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def _evaluate_image(self, path: Path, reference_path: Path | None, reference_expected: bool) -> list[MetricReport]:
        image_id = path.stem
        if reference_expected and reference_path is None:
            logger.warning("eval_reference_missing", path=str(path))
            missing = f"{ErrorCode.IO_NOT_FOUND.value} No reference image with stem '{image_id}'"
        else:
            missing = None
        try:
            before = image_io.load_image(path)
            reference = image_io.load_image(reference_path) if reference_path is not None else None
        except ImageIOError as e:
            logger.warning("eval_image_unreadable", path=str(path), error=e.message)
            return [MetricReport(id=image_id, method=m.text, error=f"{e.code.value} {e.message}") for m in self.methods]

        reports = []
        for spec, op in zip(self.methods, self._ops, strict=True):
            report = self._evaluate_method(image_id, spec, op, before, reference)
            if missing is not None:
                report = report.model_copy(update={"error": "; ".join(filter(None, [missing, report.error]))})
            reports.append(report)
        return reports

    def _evaluate_method(self, image_id, spec, op, before: ImageF, reference: ImageF | None) -> MetricReport:
        try:
            after = op(before)
            return evaluate_pair(image_id, spec.text, before, after, reference)
        except DualHazeError as e:
            logger.warning("eval_method_failed", id=image_id, method=spec.text, error=e.message)
            return MetricReport(id=image_id, method=spec.text, error=f"{e.code.value} {e.message}")
        except Exception as e:
            logger.exception("eval_method_crashed", id=image_id, method=spec.text)
            message = f"{type(e).__name__}: {e}"
            return MetricReport(id=image_id, method=spec.text, error=f"{ErrorCode.INTERNAL_ERROR.value} {message}")

    def evaluate(self, source: str | Path, reference: str | Path | None = None) -> list[MetricReport]:
        """Per-image reports ordered by input path, then by method order."""
        inputs = image_io.collect_images(source)
        references = self.pair_references(inputs, reference)
        logger.info("eval_started", images=len(inputs), methods=[m.text for m in self.methods])
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            per_image = list(pool.map(self._evaluate_image, inputs, references, repeat(reference is not None)))
        return [r for reports in per_image for r in reports]

    # ------------------------------------------------------------------
    # Tables
    # ------------------------------------------------------------------

    def aggregate(self, reports: list[MetricReport]) -> pd.DataFrame:
        """Mean of every metric per method over the rows where it is present."""
        frame = to_frame(reports)
        means = frame.groupby("method", sort=False)[list(METRICS)].mean()
        means = means.reindex([m.text for m in self.methods])
        means.index.name = "method"
        means.insert(0, "id", AGGREGATE_ID)
        return means.reset_index()[list(REPORT_COLUMNS)]

    def report(self, reports: list[MetricReport], ranks: bool = False) -> pd.DataFrame:
        """Per-image rows followed by aggregate rows, optionally with per-metric ranks."""
        rows = to_frame(reports)[list(REPORT_COLUMNS)].copy()
        agg = self.aggregate(reports)
        if ranks:
            for metric in METRICS:
                ascending = not HIGHER_IS_BETTER[metric]
                agg[rank_column(metric)] = agg[metric].rank(method="min", ascending=ascending).astype("Int64")
                rows[rank_column(metric)] = pd.array([pd.NA] * len(rows), dtype="Int64")
        return pd.concat([rows, agg], ignore_index=True)


def to_frame(reports: list[MetricReport]) -> pd.DataFrame:
    frame = pd.DataFrame([r.model_dump() for r in reports], columns=[*REPORT_COLUMNS, "error"])
    for metric in METRICS:
        frame[metric] = pd.to_numeric(frame[metric], errors="coerce").astype(np.float64)
    return frame


def errors_frame(reports: list[MetricReport]) -> pd.DataFrame:
    """Rows flagged with an error: id, method, error."""
    frame = to_frame(reports)
    return frame.loc[frame["error"].notna(), ["id", "method", "error"]].reset_index(drop=True)


def write_report(frame: pd.DataFrame, path: str | Path | None) -> str:
    """CSV text of the report; absent values are empty. Written to `path` when given."""
    text = frame.to_csv(index=False, na_rep="")
    if path is not None:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as e:
            raise ImageIOError(
                code=ErrorCode.IO_ENCODE_FAILED,
                message=f"Could not write report: {path}",
                original_error=e,
            ) from None
    return text
