"""
dualhaze command line.

    dualhaze enhance --method dehret:msr [--param sigmas=15,80,250] [--seed 1] in.png out.png
    dualhaze synth --depth ramp --beta 1.2 gt.png hazy.png
    dualhaze corpus --count 10 corpus/
    dualhaze eval --input corpus/hazy --reference corpus/gt --method dcp --method dehret:msr
    dualhaze replay out.png.manifest

Exit status: 0 ok, 1 numeric failure, 2 I/O failure, 64 usage error.
"""

import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import structlog

from dualhaze import __version__
from dualhaze.application.manifest import RunManifest
from dualhaze.application.methods import METHODS, Wrapper, parse_method, split_method_overrides
from dualhaze.application.runs import (
    CorpusParams,
    SynthParams,
    replay,
    run_corpus,
    run_enhance,
    run_eval,
    run_synth,
)
from dualhaze.core.config import settings
from dualhaze.core.errors import EXIT_NUMERIC, EXIT_OK, DualHazeError, ErrorCode, MethodParseError
from dualhaze.core.structured_logging import setup_structured_logging
from dualhaze.core.validators import build_model
from dualhaze.domain.synth import DepthPreset

logger = structlog.get_logger(__name__)


class UsageErrorParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting with status 2."""

    def error(self, message: str):  # type: ignore[override]
        raise MethodParseError(code=ErrorCode.USAGE_BAD_ARGUMENTS, message=f"{self.prog}: {message}")


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed '{text}'") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2^64), got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer '{text}'") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def _method_help() -> str:
    names = ", ".join(METHODS)
    prefixes = ", ".join(f"{w.value}:" for w in Wrapper)
    return f"one of {names}; optionally prefixed by {prefixes}"


def build_parser() -> argparse.ArgumentParser:
    parser = UsageErrorParser(
        prog="dualhaze",
        description="Retinex and image dehazing as dual operators under intensity inversion",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--log-file", default=settings.LOG_FILE, help="Also write JSON logs to this file")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=UsageErrorParser)

    common = UsageErrorParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=settings.SEED, help="Run seed (default: $DUALHAZE_SEED or 0)")
    common.add_argument(
        "--workers",
        type=_positive_int,
        default=settings.MAX_WORKERS,
        help="Images processed concurrently",
    )

    enhance = sub.add_parser("enhance", parents=[common], help="Enhance or dehaze an image or a directory")
    enhance.add_argument("--method", required=True, help=_method_help())
    enhance.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Method parameter override; repeatable; lists use commas",
    )
    enhance.add_argument("input", type=Path, help="Input image or directory")
    enhance.add_argument("output", type=Path, help="Output image, or directory when input is a directory")
    enhance.set_defaults(handler=cmd_enhance)

    synth = sub.add_parser("synth", parents=[common], help="Add synthetic fog to a ground-truth image")
    synth.add_argument(
        "--depth",
        default=DepthPreset.RAMP.value,
        help=f"Depth preset ({', '.join(p.value for p in DepthPreset)}) or a PGM depth map",
    )
    synth.add_argument("--steps", type=_positive_int, default=4, help="Bands of the steps preset")
    synth.add_argument("--beta", type=float, default=1.0, help="Extinction coefficient")
    synth.add_argument("--amp", type=float, default=0.1, help="Perturbation amplitude in [0, 0.5]")
    synth.add_argument("--scale", type=float, default=32.0, help="Perturbation correlation length (pixels)")
    synth.add_argument("--airlight", type=_float_list, default=(1.0, 1.0, 1.0), help="Airlight r,g,b")
    synth.add_argument("--bits", type=int, default=settings.PNG_BITS, choices=(8, 16))
    synth.add_argument("--transmission", type=Path, help="Transmission output (default: <hazy stem>_t.png)")
    synth.add_argument("ground_truth", type=Path)
    synth.add_argument("hazy", type=Path)
    synth.set_defaults(handler=cmd_synth)

    corpus = sub.add_parser("corpus", parents=[common], help="Generate a seeded synthetic corpus")
    corpus.add_argument("--count", type=_positive_int, default=10)
    corpus.add_argument("--height", type=_positive_int, default=64)
    corpus.add_argument("--width", type=_positive_int, default=64)
    corpus.add_argument("--beta-range", type=_float_list, default=(0.8, 1.6), help="low,high extinction")
    corpus.add_argument("--amp", type=float, default=0.1)
    corpus.add_argument("--scale", type=float, default=32.0)
    corpus.add_argument("out_dir", type=Path)
    corpus.set_defaults(handler=cmd_corpus)

    evaluate = sub.add_parser("eval", parents=[common], help="Evaluate methods and write a CSV report")
    evaluate.add_argument("--input", required=True, type=Path, help="Test image or directory")
    evaluate.add_argument("--reference", type=Path, help="Ground-truth image or directory (matched by name)")
    evaluate.add_argument("--method", action="append", default=[], help=_method_help() + "; repeatable")
    evaluate.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="METHOD.KEY=VALUE",
        help="Per-method parameter override; repeatable",
    )
    evaluate.add_argument("--output", type=Path, help="CSV path (default: stdout)")
    evaluate.add_argument("--ranks", action="store_true", help="Append per-metric rank columns to the means")
    evaluate.set_defaults(handler=cmd_eval)

    rerun = sub.add_parser("replay", help="Re-execute a run from its manifest")
    rerun.add_argument("manifest", type=Path)
    rerun.add_argument("--workers", type=_positive_int, default=settings.MAX_WORKERS)
    rerun.set_defaults(handler=cmd_replay)

    return parser


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_enhance(args: argparse.Namespace) -> int:
    spec = parse_method(args.method, args.param)
    manifest = run_enhance(args.input, args.output, spec, args.seed, args.workers)
    print(f"{len(manifest.outputs)} image(s) written with {spec.text}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    params = build_model(
        SynthParams,
        depth=args.depth,
        steps=args.steps,
        beta=args.beta,
        perturb_amp=args.amp,
        perturb_scale=args.scale,
        airlight=args.airlight,
        bits=args.bits,
    )
    transmission = args.transmission or args.hazy.with_name(f"{args.hazy.stem}_t.png")
    run_synth(args.ground_truth, args.hazy, transmission, params, args.seed)
    print(f"hazy image {args.hazy}, transmission {transmission}")
    return EXIT_OK


def cmd_corpus(args: argparse.Namespace) -> int:
    if len(args.beta_range) != 2:
        raise MethodParseError(code=ErrorCode.USAGE_BAD_ARGUMENTS, message="--beta-range takes exactly low,high")
    params = build_model(
        CorpusParams,
        count=args.count,
        height=args.height,
        width=args.width,
        beta_low=args.beta_range[0],
        beta_high=args.beta_range[1],
        perturb_amp=args.amp,
        perturb_scale=args.scale,
    )
    run_corpus(args.out_dir, params, args.seed)
    print(f"{params.count} sample(s) written under {args.out_dir}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    texts = args.method or ["none"]
    routed = split_method_overrides(args.param, texts)
    specs = [parse_method(t, routed[t]) for t in texts]
    result = run_eval(args.input, args.reference, specs, args.seed, args.output, args.ranks, args.workers)
    if args.output is None:
        sys.stdout.write(result.csv)
    if result.errors:
        print(f"{result.errors} row(s) flagged with errors", file=sys.stderr)
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    manifest = replay(RunManifest.load(args.manifest), workers=args.workers)
    print(f"replayed {manifest.command} run from {args.manifest}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def run_guarded(handler: Callable[[argparse.Namespace], int], args: argparse.Namespace) -> int:
    """Run a command, mapping failures to the exit-status convention."""
    try:
        return handler(args)
    except DualHazeError as e:
        logger.warning("dualhaze_error", error_code=e.code.value, message=e.message, details=e.details)
        print(f"error[{e.code.value}]: {e.message}", file=sys.stderr)
        return e.exit_status
    except Exception as e:
        logger.error("unhandled_exception", exc_info=True)
        print(f"error[{ErrorCode.INTERNAL_ERROR.value}]: {e}", file=sys.stderr)
        return EXIT_NUMERIC


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except DualHazeError as e:
        print(f"error[{e.code.value}]: {e.message}", file=sys.stderr)
        return e.exit_status
    setup_structured_logging(args.log_level, args.log_file)
    logger.info("command_started", command=args.command, version=__version__)
    return run_guarded(args.handler, args)


if __name__ == "__main__":
    sys.exit(main())
