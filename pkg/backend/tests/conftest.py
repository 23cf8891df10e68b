from collections.abc import Callable

import numpy as np
import pytest

from dualhaze.core.image import ImageF
from dualhaze.core.structured_logging import setup_structured_logging
from dualhaze.domain.synth import synth_scene

setup_structured_logging("ERROR", "test.log")


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so every random fixture is reproducible."""
    return np.random.default_rng(12345)


@pytest.fixture
def random_image(rng: np.random.Generator) -> Callable[..., ImageF]:
    """Factory for random images with values in [lo, hi]."""

    def _make(height: int = 16, width: int = 16, channels: int = 3, lo: float = 0.0, hi: float = 1.0) -> ImageF:
        return ImageF(rng.uniform(lo, hi, size=(channels, height, width)))

    return _make


@pytest.fixture
def rgb_image(random_image) -> ImageF:
    return random_image(32, 32, 3)


@pytest.fixture
def gray_image(random_image) -> ImageF:
    return random_image(32, 32, 1)


@pytest.fixture
def dark_scene() -> Callable[..., ImageF]:
    """Factory for colourful scenes whose dark channel is zero at every pixel."""

    def _make(height: int = 48, width: int = 48, seed: int = 7) -> ImageF:
        return synth_scene(height, width, seed)

    return _make


@pytest.fixture
def tmp_png(tmp_path):
    """Write an ImageF to a PNG under tmp_path and return the path."""
    from dualhaze.infrastructure.image_io import save_image

    def _write(img: ImageF, name: str = "img.png", bits: int = 16):
        return save_image(img, tmp_path / name, bits=bits)

    return _write
