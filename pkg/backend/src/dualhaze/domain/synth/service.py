"""
Synthetic fog: depth presets, perturbed Koschmieder degradation and seeded corpora.
"""

import math

import numpy as np
import structlog

from dualhaze.core.errors import ErrorCode, ValidationError
from dualhaze.core.image import ImageF
from dualhaze.core.validators import ensure_same_grid
from dualhaze.domain.dehaze.models import TransmissionMap
from dualhaze.domain.dehaze.service import koschmieder_forward
from dualhaze.domain.synth.models import DepthField, DepthPreset, FogSpec, SynthSample

logger = structlog.get_logger(__name__)

T_FLOOR = 1e-6
DEFAULT_STEPS = 4


def depth_to_transmission(d: DepthField, beta: float) -> TransmissionMap:
    """t(x) = exp(-beta d(x)), stored unclamped."""
    if beta < 0.0:
        raise ValidationError(code=ErrorCode.VALIDATION_ERROR, message=f"beta must be >= 0, got {beta}")
    return TransmissionMap(np.exp(-beta * d.data))


def _value_noise(height: int, width: int, scale: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform [-1, 1] lattice every `scale` pixels, smoothstep-bilinear in between."""
    ny = math.ceil((height - 1) / scale) + 2
    nx = math.ceil((width - 1) / scale) + 2
    lattice = rng.uniform(-1.0, 1.0, size=(ny, nx))

    gy = np.arange(height) / scale
    gx = np.arange(width) / scale
    iy = np.floor(gy).astype(np.int64)
    ix = np.floor(gx).astype(np.int64)
    fy = gy - iy
    fx = gx - ix
    sy = (fy * fy * (3.0 - 2.0 * fy))[:, None]
    sx = (fx * fx * (3.0 - 2.0 * fx))[None, :]

    v00 = lattice[iy[:, None], ix[None, :]]
    v01 = lattice[iy[:, None], ix[None, :] + 1]
    v10 = lattice[iy[:, None] + 1, ix[None, :]]
    v11 = lattice[iy[:, None] + 1, ix[None, :] + 1]
    top = v00 + (v01 - v00) * sx
    bottom = v10 + (v11 - v10) * sx
    return top + (bottom - top) * sy


def perturbation_field(shape: tuple[int, int], amp: float, scale: float, seed: int) -> np.ndarray:
    """Smooth multiplicative field 1 + amp * (N - mean N) with exact mean 1."""
    height, width = shape
    if scale <= 0.0:
        raise ValidationError(code=ErrorCode.VALIDATION_ERROR, message=f"scale must be positive, got {scale}")
    if amp == 0.0:
        return np.ones((height, width))
    noise = _value_noise(height, width, scale, np.random.default_rng(seed))
    return 1.0 + amp * (noise - noise.mean())


def synth_fog(j: ImageF, d: DepthField, spec: FogSpec | None = None) -> tuple[ImageF, TransmissionMap]:
    """Perturbed Koschmieder degradation of J; returns the hazy image and ground-truth t."""
    spec = spec or FogSpec()
    ensure_same_grid(j.data, d.data, "scene and depth")
    t0 = depth_to_transmission(d, spec.beta).data
    field = perturbation_field(t0.shape, spec.perturb_amp, spec.perturb_scale, spec.seed)
    t = TransmissionMap(np.clip(t0 * field, T_FLOOR, 1.0))
    hazy = koschmieder_forward(j, t, spec.airlight)
    logger.debug("fog_synthesised", beta=spec.beta, seed=spec.seed, t_mean=round(float(t.data.mean()), 6))
    return hazy, t


def depth_presets(name: str, width: int, height: int, steps: int = DEFAULT_STEPS) -> DepthField:
    """
    Deterministic depth maps in [0, 1].

    ramp: 0 on the bottom row rising linearly to 1 on the top row.
    corridor: 1 at the image centre, falling linearly to 0 on the border.
    steps: `steps` horizontal bands, nearest (0) at the bottom.
    """
    try:
        preset = DepthPreset(name)
    except ValueError:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"Unknown depth preset '{name}'",
            details={"known": [p.value for p in DepthPreset]},
        ) from None
    if width < 1 or height < 1:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"Depth size must be positive, got {width}x{height}",
        )

    y = np.arange(height, dtype=np.float64)[:, None]
    x = np.arange(width, dtype=np.float64)[None, :]
    if preset is DepthPreset.RAMP:
        column = (height - 1 - y) / (height - 1) if height > 1 else np.zeros_like(y)
        return DepthField(np.broadcast_to(column, (height, width)))
    if preset is DepthPreset.CORRIDOR:
        cy, cx = (height - 1) / 2.0, (width - 1) / 2.0
        dy = np.abs(y - cy) / cy if cy > 0 else np.zeros_like(y)
        dx = np.abs(x - cx) / cx if cx > 0 else np.zeros_like(x)
        return DepthField(np.clip(1.0 - np.maximum(dy, dx), 0.0, 1.0))

    if steps < 1 or steps > height:
        raise ValidationError(
            code=ErrorCode.VALIDATION_ERROR,
            message=f"steps must lie in [1, height], got {steps}",
        )
    band = np.floor(y * steps / height)
    level = (steps - 1 - band) / (steps - 1) if steps > 1 else np.zeros_like(band)
    return DepthField(np.broadcast_to(level, (height, width)))


def synth_scene(height: int, width: int, seed: int, scale: float = 16.0) -> ImageF:
    """
    Colourful piecewise-smooth scene whose dark channel is zero at every pixel.

    Each channel is smooth value noise; the smallest channel of every pixel is set to 0.
    """
    rng = np.random.default_rng(seed)
    planes = np.stack([_value_noise(height, width, scale, rng) for _ in range(3)])
    planes = 0.15 + 0.8 * (planes + 1.0) / 2.0
    darkest = planes.argmin(axis=0)
    np.put_along_axis(planes, darkest[np.newaxis], 0.0, axis=0)
    return ImageF.clipped(planes)


def synth_corpus(
    count: int,
    height: int = 64,
    width: int = 64,
    seed: int = 0,
    beta_range: tuple[float, float] = (0.8, 1.6),
    perturb_amp: float = 0.1,
    perturb_scale: float = 32.0,
) -> list[SynthSample]:
    """Seeded corpus cycling through the depth presets with varying extinction."""
    if count < 1:
        raise ValidationError(code=ErrorCode.VALIDATION_ERROR, message=f"count must be >= 1, got {count}")
    lo, hi = beta_range
    rng = np.random.default_rng(seed)
    presets = list(DepthPreset)
    samples = []
    for i in range(count):
        scene_seed, fog_seed = (int(s) for s in rng.integers(0, 2**31, size=2))
        beta = float(rng.uniform(lo, hi))
        depth = depth_presets(presets[i % len(presets)].value, width, height, min(DEFAULT_STEPS, height))
        fog = FogSpec(beta=beta, perturb_amp=perturb_amp, perturb_scale=perturb_scale, seed=fog_seed)
        truth = synth_scene(height, width, scene_seed)
        hazy, t = synth_fog(truth, depth, fog)
        samples.append(
            SynthSample(
                id=f"synth_{i:03d}",
                ground_truth=truth,
                hazy=hazy,
                transmission=t,
                depth=depth,
                fog=fog,
            )
        )
    logger.info("corpus_generated", count=count, height=height, width=width, seed=seed)
    return samples
