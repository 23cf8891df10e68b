"""
Batch runs behind the CLI commands: enhance, synth, corpus and replay.

Each run writes a manifest next to its primary output; replaying that manifest
re-executes the run with the same inputs, outputs, seed and parameters.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import structlog
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from dualhaze.application.evaluation import EvaluationEngine, errors_frame, write_report
from dualhaze.application.manifest import RunManifest, manifest_path
from dualhaze.application.methods import MethodSpec, parse_method, resolve_params, split_method_overrides
from dualhaze.core.config import settings
from dualhaze.core.errors import ErrorCode, ImageIOError, MethodParseError
from dualhaze.domain.dehaze import AtmosphericLight
from dualhaze.domain.duality import EnhancerRef
from dualhaze.domain.metrics import MetricReport
from dualhaze.domain.synth import DepthPreset, FogSpec, depth_presets, synth_corpus, synth_fog
from dualhaze.infrastructure import image_io

logger = structlog.get_logger(__name__)

CMD_ENHANCE = "enhance"
CMD_SYNTH = "synth"
CMD_CORPUS = "corpus"
CMD_EVAL = "eval"
METHOD_SEPARATOR = "|"


class SynthParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    depth: str = DepthPreset.RAMP.value
    steps: int = Field(default=4, ge=1)
    beta: float = Field(default=1.0, ge=0.0)
    perturb_amp: float = Field(default=0.1, ge=0.0, le=0.5)
    perturb_scale: float = Field(default=32.0, gt=0.0)
    airlight: tuple[float, float, float] = (1.0, 1.0, 1.0)
    bits: int = Field(default_factory=lambda: settings.PNG_BITS)

    @field_validator("bits")
    @classmethod
    def _bits(cls, v: int) -> int:
        if v not in (8, 16):
            raise ValueError("bits must be 8 or 16")
        return v

    @field_validator("airlight")
    @classmethod
    def _airlight(cls, v: tuple[float, float, float]) -> tuple[float, float, float]:
        if any(not (0.0 < c <= 1.0) for c in v):
            raise ValueError(f"airlight components must lie in (0, 1], got {v}")
        return v


class CorpusParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    count: int = Field(default=10, ge=1)
    height: int = Field(default=64, ge=1)
    width: int = Field(default=64, ge=1)
    beta_low: float = Field(default=0.8, ge=0.0)
    beta_high: float = Field(default=1.6, ge=0.0)
    perturb_amp: float = Field(default=0.1, ge=0.0, le=0.5)
    perturb_scale: float = Field(default=32.0, gt=0.0)
    bits: int = 16

    @field_validator("bits")
    @classmethod
    def _bits(cls, v: int) -> int:
        if v not in (8, 16):
            raise ValueError("bits must be 8 or 16")
        return v

    @model_validator(mode="after")
    def _beta_order(self) -> "CorpusParams":
        if self.beta_low > self.beta_high:
            raise ValueError("beta_low must not exceed beta_high")
        return self


def _apply(op: EnhancerRef, src: Path, dst: Path) -> Path:
    started = time.perf_counter()
    img = image_io.load_image(src)
    out = op(img)
    image_io.save_image(out, dst)
    logger.info(
        "image_enhanced",
        method=op.name,
        input=str(src),
        output=str(dst),
        width=img.width,
        height=img.height,
        elapsed_s=round(time.perf_counter() - started, 4),
    )
    return dst


def enhance_paths(
    inputs: list[Path],
    outputs: list[Path],
    spec: MethodSpec,
    seed: int,
    workers: int | None = None,
) -> list[Path]:
    """Apply one method to many files concurrently; results keep input order."""
    op = spec.build(seed)
    workers = workers or settings.MAX_WORKERS
    if workers == 1 or len(inputs) == 1:
        return [_apply(op, src, dst) for src, dst in zip(inputs, outputs, strict=True)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_apply, [op] * len(inputs), inputs, outputs))


def run_enhance(
    source: str | Path,
    target: str | Path,
    spec: MethodSpec,
    seed: int,
    workers: int | None = None,
) -> RunManifest:
    """Enhance one image, or every image of a directory into a target directory."""
    source, target = Path(source), Path(target)
    inputs = image_io.collect_images(source)
    if source.is_dir():
        outputs = [target / src.with_suffix(".png").name for src in inputs]
    else:
        outputs = [target]
    manifest = RunManifest.create(
        command=CMD_ENHANCE,
        seed=seed,
        inputs=inputs,
        outputs=outputs,
        params=spec.snapshot(),
        method=spec.text,
    )
    enhance_paths(inputs, outputs, spec, seed, workers)
    manifest.save(manifest_path(target))
    return manifest


def _depth_for(params: SynthParams, width: int, height: int):
    if params.depth in {p.value for p in DepthPreset}:
        return depth_presets(params.depth, width, height, params.steps)
    return image_io.load_depth(params.depth)


def run_synth(
    ground_truth: str | Path,
    hazy: str | Path,
    transmission: str | Path,
    params: SynthParams,
    seed: int,
) -> RunManifest:
    """Degrade a ground-truth image with perturbed fog; writes hazy image and 16-bit t."""
    truth = image_io.load_image(ground_truth)
    depth = _depth_for(params, truth.width, truth.height)
    fog = FogSpec(
        beta=params.beta,
        airlight=AtmosphericLight(rgb=params.airlight),
        perturb_amp=params.perturb_amp,
        perturb_scale=params.perturb_scale,
        seed=seed,
    )
    out, t = synth_fog(truth, depth, fog)
    image_io.save_image(out, hazy, bits=params.bits)
    image_io.save_transmission(t, transmission)
    manifest = RunManifest.create(
        command=CMD_SYNTH,
        seed=seed,
        inputs=[Path(ground_truth)],
        outputs=[Path(hazy), Path(transmission)],
        params=params.model_dump(mode="json"),
    )
    manifest.save(manifest_path(hazy))
    logger.info("fog_written", ground_truth=str(ground_truth), hazy=str(hazy), beta=params.beta)
    return manifest


def run_corpus(out_dir: str | Path, params: CorpusParams, seed: int) -> RunManifest:
    """
    Generate a seeded synthetic corpus under out_dir:
    gt/, hazy/, transmission/ (16-bit PNG) and depth/ (16-bit PGM).
    """
    out_dir = Path(out_dir)
    samples = synth_corpus(
        params.count,
        height=params.height,
        width=params.width,
        seed=seed,
        beta_range=(params.beta_low, params.beta_high),
        perturb_amp=params.perturb_amp,
        perturb_scale=params.perturb_scale,
    )
    for s in samples:
        image_io.save_image(s.ground_truth, out_dir / "gt" / f"{s.id}.png", bits=params.bits)
        image_io.save_image(s.hazy, out_dir / "hazy" / f"{s.id}.png", bits=params.bits)
        image_io.save_transmission(s.transmission, out_dir / "transmission" / f"{s.id}.png")
        image_io.save_depth(s.depth, out_dir / "depth" / f"{s.id}.pgm")
    manifest = RunManifest.create(
        command=CMD_CORPUS,
        seed=seed,
        inputs=[],
        outputs=[out_dir],
        params=params.model_dump(mode="json"),
    )
    manifest.save(manifest_path(out_dir))
    return manifest


@dataclass(frozen=True)
class EvalResult:
    csv: str
    reports: list[MetricReport]
    errors: int
    manifest: RunManifest | None


def errors_path(output: Path) -> Path:
    return output.with_name(output.name + ".errors.csv")


def run_eval(
    source: str | Path,
    reference: str | Path | None,
    specs: list[MethodSpec],
    seed: int,
    output: str | Path | None = None,
    ranks: bool = False,
    workers: int | None = None,
) -> EvalResult:
    """
    Evaluate methods and write the CSV report. With an output path, flagged rows go
    to `<output>.errors.csv` and a manifest is written next to the report.
    """
    engine = EvaluationEngine(specs, seed, workers)
    reports = engine.evaluate(source, reference)
    frame = engine.report(reports, ranks=ranks)
    out_path = Path(output) if output is not None else None
    text = write_report(frame, out_path)
    errors = errors_frame(reports)

    manifest = None
    if out_path is not None:
        if not errors.empty:
            write_report(errors, errors_path(out_path))
        params: dict[str, object] = {f"{s.text}.{k}": v for s in specs for k, v in s.snapshot().items()}
        params["ranks"] = ranks
        manifest = RunManifest.create(
            command=CMD_EVAL,
            seed=seed,
            inputs=[Path(source)] + ([Path(reference)] if reference is not None else []),
            outputs=[out_path],
            params=params,
            method=METHOD_SEPARATOR.join(s.text for s in specs),
        )
        manifest.save(manifest_path(out_path))
    logger.info("eval_finished", rows=len(reports), errors=len(errors), output=str(out_path))
    return EvalResult(csv=text, reports=reports, errors=len(errors), manifest=manifest)


def _replay_eval(manifest: RunManifest, workers: int | None) -> RunManifest:
    if manifest.method is None or len(manifest.inputs) not in (1, 2) or len(manifest.outputs) != 1:
        raise MethodParseError(
            code=ErrorCode.USAGE_BAD_MANIFEST,
            message="Eval manifest needs methods, one or two inputs and one output",
        )
    texts = manifest.method.split(METHOD_SEPARATOR)
    overrides = [f"{k}={v}" for k, v in manifest.params.items() if k != "ranks"]
    routed = split_method_overrides(overrides, texts)
    specs = [parse_method(t, routed[t]) for t in texts]
    reference = manifest.inputs[1] if len(manifest.inputs) == 2 else None
    ranks = manifest.params.get("ranks", "false") == "true"
    run_eval(manifest.inputs[0], reference, specs, manifest.seed, manifest.outputs[0], ranks, workers)
    return manifest


def replay(manifest: RunManifest, workers: int | None = None) -> RunManifest:
    """Re-execute a run from its manifest alone."""
    logger.info("replay_started", command=manifest.command, seed=manifest.seed)
    if manifest.command == CMD_ENHANCE:
        if manifest.method is None or len(manifest.inputs) != len(manifest.outputs) or not manifest.inputs:
            raise MethodParseError(
                code=ErrorCode.USAGE_BAD_MANIFEST,
                message="Enhance manifest needs a method and matching input/output lists",
            )
        spec = parse_method(manifest.method, manifest.overrides())
        inputs = [Path(p) for p in manifest.inputs]
        for src in inputs:
            if not src.is_file():
                raise ImageIOError(code=ErrorCode.IO_NOT_FOUND, message=f"No such image file: {src}")
        enhance_paths(inputs, [Path(p) for p in manifest.outputs], spec, manifest.seed, workers)
        return manifest
    if manifest.command == CMD_SYNTH:
        if len(manifest.inputs) != 1 or len(manifest.outputs) != 2:
            raise MethodParseError(
                code=ErrorCode.USAGE_BAD_MANIFEST,
                message="Synth manifest needs one input and two outputs",
            )
        params = resolve_params(SynthParams, manifest.overrides(), CMD_SYNTH)
        return run_synth(manifest.inputs[0], manifest.outputs[0], manifest.outputs[1], params, manifest.seed)
    if manifest.command == CMD_CORPUS:
        if len(manifest.outputs) != 1:
            raise MethodParseError(
                code=ErrorCode.USAGE_BAD_MANIFEST,
                message="Corpus manifest needs exactly one output directory",
            )
        params = resolve_params(CorpusParams, manifest.overrides(), CMD_CORPUS)
        return run_corpus(manifest.outputs[0], params, manifest.seed)
    if manifest.command == CMD_EVAL:
        return _replay_eval(manifest, workers)
    raise MethodParseError(
        code=ErrorCode.USAGE_BAD_MANIFEST,
        message=f"Unknown manifest command '{manifest.command}'",
    )
