from dualhaze.domain.synth.models import DepthField, DepthPreset, FogSpec, SynthSample
from dualhaze.domain.synth.service import (
    depth_presets,
    depth_to_transmission,
    perturbation_field,
    synth_corpus,
    synth_fog,
    synth_scene,
)

__all__ = [
    "DepthField",
    "DepthPreset",
    "FogSpec",
    "SynthSample",
    "depth_presets",
    "depth_to_transmission",
    "perturbation_field",
    "synth_corpus",
    "synth_fog",
    "synth_scene",
]
