"""
Method registry and method-string parsing.

A method string names one backend (`msr`, `dcp`, ...) optionally wrapped by one
side of the duality (`dehret:msr`, `retdeh:dcp`). Parameter overrides arrive as
`key=value` strings and are validated against the backend's parameter model
before any image is read.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass
from enum import StrEnum
from typing import Any, TypeVar

from pydantic import BaseModel, ConfigDict, Field, field_validator

from dualhaze.core.errors import ErrorCode, MethodParseError
from dualhaze.core.image import hist_equalize
from dualhaze.domain.dehaze import AtmosphericLight, PatchSpec, dcp_dehaze
from dualhaze.domain.duality import IDENTITY, EnhancerRef, dehret, retdeh
from dualhaze.domain.retinex import (
    PathConfig,
    ScaleBank,
    ScalingFn,
    SprayConfig,
    homomorphic,
    kbr,
    lrsr,
    msr,
    path_retinex,
    rsr,
    ssr,
)


class Wrapper(StrEnum):
    DEHRET = "dehret"
    RETDEH = "retdeh"


class MethodKind(StrEnum):
    BASELINE = "baseline"
    RETINEX = "retinex"
    DEHAZE = "dehaze"


# ---------------------------------------------------------------------------
# Parameter models
# ---------------------------------------------------------------------------


class MethodParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


P = TypeVar("P", bound=BaseModel)


class NoParams(MethodParams):
    pass


class HEParams(MethodParams):
    bins: int = Field(default=256, ge=2)


class DCPParams(MethodParams):
    patch_radius: int = Field(default=7, ge=0)
    retain: float = Field(default=1.0, gt=0.0, le=1.0)
    refine: bool = True
    refine_radius: int = Field(default=20, ge=0)
    refine_reg: float = Field(default=1e-3, gt=0.0)
    top_fraction: float = Field(default=0.001, gt=0.0, le=1.0)
    t_min: float | None = Field(default=None, ge=0.0, lt=1.0)
    white_airlight: bool = True


class SSRParams(MethodParams):
    sigma: float = Field(default=80.0, gt=0.0)


class HFParams(MethodParams):
    sigma: float = Field(default=20.0, gt=0.0)
    log_domain: bool = True


class MSRParams(MethodParams):
    sigmas: tuple[float, ...] = (15.0, 80.0, 250.0)
    weights: tuple[float, ...] | None = None


class SprayParams(MethodParams):
    n: int = Field(default=75, ge=1)
    sprays: int = Field(default=20, ge=1)
    radius: float | None = Field(default=None, gt=0.0)
    reach: float = Field(default=0.2, gt=0.0, le=1.0)
    seed: int | None = Field(default=None, ge=0, lt=2**64)


class LRSRParams(MethodParams):
    n: int = Field(default=75, ge=1)
    radius: float | None = Field(default=None, gt=0.0)
    reach: float = Field(default=0.2, gt=0.0, le=1.0)
    k1: int = Field(default=25, ge=1)
    k2: int = Field(default=25, ge=1)
    seed: int | None = Field(default=None, ge=0, lt=2**64)

    @field_validator("k1", "k2")
    @classmethod
    def _odd(cls, v: int) -> int:
        if v % 2 == 0:
            raise ValueError(f"kernel size must be odd, got {v}")
        return v


class KBRParams(MethodParams):
    omega_sigma: float = Field(default=5.0, gt=0.0)
    window: int | None = Field(default=None, ge=1)
    scaling: ScalingFn = ScalingFn.IDENTITY

    @field_validator("window")
    @classmethod
    def _odd_window(cls, v: int | None) -> int | None:
        if v is not None and v % 2 == 0:
            raise ValueError(f"window must be odd, got {v}")
        return v


class PathParams(MethodParams):
    num_paths: int = Field(default=50, ge=1)
    path_length: int | None = Field(default=None, ge=1)
    scaling: ScalingFn = ScalingFn.IDENTITY
    seed: int | None = Field(default=None, ge=0, lt=2**64)


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------


def _none(p: NoParams, seed: int) -> EnhancerRef:
    return IDENTITY


def _he(p: HEParams, seed: int) -> EnhancerRef:
    return EnhancerRef.bind("he", hist_equalize, bins=p.bins)


def _dcp(p: DCPParams, seed: int) -> EnhancerRef:
    return EnhancerRef.bind(
        "dcp",
        dcp_dehaze,
        patch=PatchSpec(radius=p.patch_radius),
        retain=p.retain,
        refine=p.refine,
        airlight=AtmosphericLight.white() if p.white_airlight else None,
        top_fraction=p.top_fraction,
        refine_radius=p.refine_radius,
        refine_reg=p.refine_reg,
        t_min=p.t_min,
    )


def _ssr(p: SSRParams, seed: int) -> EnhancerRef:
    return EnhancerRef.bind("ssr", ssr, sigma=p.sigma)


def _msr(p: MSRParams, seed: int) -> EnhancerRef:
    if p.weights is None:
        bank = ScaleBank.uniform(p.sigmas)
    else:
        bank = ScaleBank(sigmas=p.sigmas, weights=p.weights)
    return EnhancerRef.bind("msr", msr, bank=bank)


def _rsr(p: SprayParams, seed: int) -> EnhancerRef:
    cfg = SprayConfig(
        samples_per_spray=p.n,
        num_sprays=p.sprays,
        radius=p.radius,
        reach=p.reach,
        seed=seed if p.seed is None else p.seed,
    )
    return EnhancerRef.bind("rsr", rsr, cfg=cfg)


def _lrsr(p: LRSRParams, seed: int) -> EnhancerRef:
    cfg = SprayConfig(
        samples_per_spray=p.n,
        num_sprays=1,
        radius=p.radius,
        reach=p.reach,
        seed=seed if p.seed is None else p.seed,
    )
    return EnhancerRef.bind("lrsr", lrsr, cfg=cfg, k1=p.k1, k2=p.k2)


def _kbr(p: KBRParams, seed: int) -> EnhancerRef:
    return EnhancerRef.bind("kbr", kbr, omega_sigma=p.omega_sigma, window=p.window, f=p.scaling)


def _hf(p: HFParams, seed: int) -> EnhancerRef:
    return EnhancerRef.bind("hf", homomorphic, sigma=p.sigma, log_domain=p.log_domain)


def _path(p: PathParams, seed: int) -> EnhancerRef:
    cfg = PathConfig(
        num_paths=p.num_paths,
        path_length=p.path_length,
        scaling=p.scaling,
        seed=seed if p.seed is None else p.seed,
    )
    return EnhancerRef.bind("path", path_retinex, cfg=cfg)


@dataclass(frozen=True)
class MethodEntry:
    name: str
    kind: MethodKind
    params: type[MethodParams]
    factory: Callable[[Any, int], EnhancerRef]
    summary: str


METHODS: dict[str, MethodEntry] = {
    e.name: e
    for e in (
        MethodEntry("none", MethodKind.BASELINE, NoParams, _none, "no processing"),
        MethodEntry("he", MethodKind.BASELINE, HEParams, _he, "histogram equalisation"),
        MethodEntry("dcp", MethodKind.DEHAZE, DCPParams, _dcp, "dark channel prior dehazing"),
        MethodEntry("ssr", MethodKind.RETINEX, SSRParams, _ssr, "single-scale Retinex"),
        MethodEntry("msr", MethodKind.RETINEX, MSRParams, _msr, "multi-scale Retinex"),
        MethodEntry("rsr", MethodKind.RETINEX, SprayParams, _rsr, "random spray Retinex"),
        MethodEntry("lrsr", MethodKind.RETINEX, LRSRParams, _lrsr, "light random spray Retinex"),
        MethodEntry("kbr", MethodKind.RETINEX, KBRParams, _kbr, "kernel-based Retinex"),
        MethodEntry("hf", MethodKind.RETINEX, HFParams, _hf, "homomorphic filtering"),
        MethodEntry("path", MethodKind.RETINEX, PathParams, _path, "path-based Retinex"),
    )
}


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _coerce(raw: str) -> Any:
    """Comma lists become lists; 'none' becomes None; everything else is left to pydantic."""
    text = raw.strip()
    if text.lower() in {"none", "null"}:
        return None
    if "," in text:
        return [part.strip() for part in text.split(",") if part.strip()]
    return text


def parse_overrides(items: Iterable[str]) -> dict[str, Any]:
    """Parse repeated `key=value` strings; later keys win."""
    values: dict[str, Any] = {}
    for item in items:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise MethodParseError(
                code=ErrorCode.USAGE_INVALID_PARAMETER,
                message=f"Parameter override must look like key=value, got '{item}'",
            )
        values[key] = _coerce(raw)
    return values


class MethodSpec(BaseModel):
    """A parsed method string with its fully resolved parameters."""

    model_config = ConfigDict(frozen=True)

    wrapper: Wrapper | None = None
    base: str
    params: dict[str, Any] = Field(default_factory=dict)

    @property
    def text(self) -> str:
        return f"{self.wrapper.value}:{self.base}" if self.wrapper else self.base

    @property
    def entry(self) -> MethodEntry:
        return METHODS[self.base]

    def resolved(self) -> MethodParams:
        return self.entry.params(**self.params)

    def snapshot(self) -> dict[str, Any]:
        """Every parameter of the backend, defaults included."""
        return self.resolved().model_dump(mode="json")

    def build(self, seed: int) -> EnhancerRef:
        """Bind the backend and wrap it on the requested side of the duality."""
        backend = self.entry.factory(self.resolved(), seed)
        if self.wrapper is None:
            return backend
        side = dehret if self.wrapper is Wrapper.DEHRET else retdeh

        def _wrapped(img):
            return side(img, backend)

        return EnhancerRef(name=self.text, fn=_wrapped, params=backend.params)


def resolve_params(model: type[P], overrides: Iterable[str] | dict[str, Any], label: str) -> P:
    """Validate overrides against a parameter model; failures are usage errors."""
    values = dict(overrides) if isinstance(overrides, dict) else parse_overrides(overrides)
    unknown = sorted(set(values) - set(model.model_fields))
    if unknown:
        raise MethodParseError(
            code=ErrorCode.USAGE_UNKNOWN_PARAMETER,
            message=f"Unknown parameter(s) for '{label}': {', '.join(unknown)}",
            details={"known": sorted(model.model_fields)},
        )
    for key, value in values.items():
        if isinstance(value, str) and "tuple" in str(model.model_fields[key].annotation):
            values[key] = [value]
    try:
        resolved = model(**values)
        if isinstance(resolved, MSRParams):
            if resolved.weights is None:
                ScaleBank.uniform(resolved.sigmas)
            else:
                ScaleBank(sigmas=resolved.sigmas, weights=resolved.weights)
    except ValueError as e:
        raise MethodParseError(
            code=ErrorCode.USAGE_INVALID_PARAMETER,
            message=f"Invalid parameters for '{label}': {e}",
            original_error=e,
        ) from None
    return resolved


def parse_method(text: str, overrides: Iterable[str] | dict[str, Any] = ()) -> MethodSpec:
    """Parse `[dehret:|retdeh:]<method>` and validate overrides against its parameters."""
    head, sep, tail = text.strip().partition(":")
    wrapper: Wrapper | None = None
    base = head
    if sep:
        try:
            wrapper = Wrapper(head)
        except ValueError:
            raise MethodParseError(
                code=ErrorCode.USAGE_UNKNOWN_METHOD,
                message=f"Unknown method prefix '{head}' in '{text}'",
                details={"known": [w.value for w in Wrapper]},
            ) from None
        base = tail
    if base not in METHODS:
        raise MethodParseError(
            code=ErrorCode.USAGE_UNKNOWN_METHOD,
            message=f"Unknown method '{text}'",
            details={"known": sorted(METHODS)},
        )
    resolved = resolve_params(METHODS[base].params, overrides, base)
    return MethodSpec(wrapper=wrapper, base=base, params=resolved.model_dump(mode="json", exclude_unset=True))


def split_method_overrides(items: Iterable[str], methods: Iterable[str]) -> dict[str, list[str]]:
    """
    Route `<method>.<key>=<value>` overrides to their method strings.

    Used when several methods run side by side, e.g. `dehret:msr.sigmas=15,80`.
    """
    routed: dict[str, list[str]] = {m: [] for m in methods}
    for item in items:
        key, sep, value = item.partition("=")
        target, dot, name = key.rpartition(".")
        if not sep or not dot or not name:
            raise MethodParseError(
                code=ErrorCode.USAGE_INVALID_PARAMETER,
                message=f"Override must look like <method>.<key>=<value>, got '{item}'",
            )
        if target not in routed:
            raise MethodParseError(
                code=ErrorCode.USAGE_UNKNOWN_METHOD,
                message=f"Override '{item}' names a method that is not being run: '{target}'",
                details={"methods": sorted(routed)},
            )
        routed[target].append(f"{name}={value}")
    return routed
