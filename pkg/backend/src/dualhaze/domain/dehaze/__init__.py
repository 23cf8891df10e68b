from dualhaze.domain.dehaze.models import AtmosphericLight, PatchSpec, TransmissionMap
from dualhaze.domain.dehaze.service import (
    dark_channel,
    dcp_dehaze,
    estimate_airlight,
    estimate_transmission,
    invert_haze_model,
    koschmieder_forward,
    refine_transmission,
)

__all__ = [
    "AtmosphericLight",
    "PatchSpec",
    "TransmissionMap",
    "dark_channel",
    "dcp_dehaze",
    "estimate_airlight",
    "estimate_transmission",
    "invert_haze_model",
    "koschmieder_forward",
    "refine_transmission",
]
