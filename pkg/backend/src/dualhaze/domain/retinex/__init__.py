from dualhaze.domain.retinex.models import PathConfig, ScaleBank, ScalingFn, SprayConfig
from dualhaze.domain.retinex.service import (
    chain_lightness,
    homomorphic,
    kbr,
    lrsr,
    msr,
    path_retinex,
    rsr,
    ssr,
)

__all__ = [
    "PathConfig",
    "ScaleBank",
    "ScalingFn",
    "SprayConfig",
    "chain_lightness",
    "homomorphic",
    "kbr",
    "lrsr",
    "msr",
    "path_retinex",
    "rsr",
    "ssr",
]
