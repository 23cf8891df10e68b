"""
Retinex / dehazing duality.

Inverting intensities turns a hazy image into an unevenly lit one and back:
dehazing(I) = 1 - Retinex(1 - I). Any backend can therefore be used on the
other side of the duality by wrapping it in two inversions.
"""

import numpy as np

from dualhaze.core import filters
from dualhaze.core.image import ImageF, invert
from dualhaze.domain.dehaze.models import AtmosphericLight, PatchSpec, TransmissionMap
from dualhaze.domain.dehaze.service import estimate_transmission, invert_haze_model
from dualhaze.domain.duality.models import EnhancerRef


def dehret(img: ImageF, retinex: EnhancerRef) -> ImageF:
    """Dehaze with a Retinex backend: 1 - retinex(1 - img), clipped."""
    return ImageF.clipped(1.0 - retinex(invert(img)).data)


def retdeh(img: ImageF, dehazer: EnhancerRef) -> ImageF:
    """Retinex with a dehazing backend: 1 - dehazer(1 - img), clipped."""
    return ImageF.clipped(1.0 - dehazer(invert(img)).data)


def dual(enhancer: EnhancerRef) -> EnhancerRef:
    """The partner operator x -> 1 - enhancer(1 - x) as an EnhancerRef."""

    def _dual(img: ImageF) -> ImageF:
        return dehret(img, enhancer)

    return EnhancerRef(name=f"dual({enhancer.name})", fn=_dual, params=enhancer.params)


def illumination_divider(t: TransmissionMap) -> EnhancerRef:
    """Ideal Retinex backend that divides every channel by a known illumination."""

    def _divide(img: ImageF) -> ImageF:
        return ImageF.clipped(img.data / t.clamped())

    return EnhancerRef(name="illumination_divider", fn=_divide, params={"t_min": t.t_min})


def transmission_dehazer(t: TransmissionMap) -> EnhancerRef:
    """Ideal dehazing backend that inverts the haze model with known t and white airlight."""
    white = AtmosphericLight.white()

    def _dehaze(img: ImageF) -> ImageF:
        return invert_haze_model(img, t, white)

    return EnhancerRef(name="transmission_dehazer", fn=_dehaze, params={"t_min": t.t_min})


def max_filter(img: ImageF, patch: PatchSpec | None = None) -> ImageF:
    """Sliding-window maximum over the patch, per channel."""
    patch = patch or PatchSpec()
    out = np.stack([filters.max_filter(img.plane(c), patch.radius) for c in range(img.channels)])
    return ImageF(out)


def inverted_transmission(img: ImageF, patch: PatchSpec | None = None) -> TransmissionMap:
    """
    Dark-channel transmission of the inverted image with white airlight and no clamp.

    On a monochrome image this equals max_filter(img, patch).
    """
    return estimate_transmission(invert(img), AtmosphericLight.white(), patch, retain=1.0, t_min=0.0)
