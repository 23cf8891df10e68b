"""
Handles on enhancement operators so they can be passed across the duality.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from functools import partial
from types import MappingProxyType
from typing import Any

from dualhaze.core.image import ImageF

Operator = Callable[[ImageF], ImageF]


@dataclass(frozen=True)
class EnhancerRef:
    """A named ImageF -> ImageF operator together with the parameters it was bound with."""

    name: str
    fn: Operator = field(compare=False)
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    def __call__(self, img: ImageF) -> ImageF:
        return self.fn(img)

    @classmethod
    def bind(cls, name: str, fn: Callable[..., ImageF], **params: Any) -> EnhancerRef:
        """Bind keyword parameters of `fn`, leaving the image as the only argument."""
        return cls(name=name, fn=partial(fn, **params), params=params)


def _identity(img: ImageF) -> ImageF:
    return img


IDENTITY = EnhancerRef(name="none", fn=_identity)
