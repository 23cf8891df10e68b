"""
System-level checks: brightness ordering of the dual operators over many images,
directional quality on a generated hazy corpus, batch determinism and speed.
"""

import time

import numpy as np
import pytest

from dualhaze.adapters.cli import main
from dualhaze.application.methods import parse_method
from dualhaze.core.image import ImageF
from dualhaze.domain.duality import dehret
from dualhaze.domain.metrics import cpsnr, ssim
from dualhaze.domain.synth import synth_corpus
from dualhaze.infrastructure.image_io import save_image

BRIGHTNESS_TOL = 1e-6

# reduced sampling budgets
BACKENDS = {
    "path": ["num_paths=10"],
    "rsr": ["n=30", "sprays=5"],
    "lrsr": ["n=30"],
    "kbr": [],
}


def _random_images() -> list[ImageF]:
    return [ImageF(np.random.default_rng(seed).uniform(size=(3, 64, 64))) for seed in range(20)]


def _hazy_fixtures() -> list[ImageF]:
    return [s.hazy for s in synth_corpus(5, 64, 64, seed=11)]


@pytest.fixture(scope="module")
def brightness_inputs() -> list[ImageF]:
    return _random_images() + _hazy_fixtures()


class TestBrightnessOrdering:
    """Retinex never darkens and its dual never brightens."""

    @pytest.mark.parametrize("name", sorted(BACKENDS))
    def test_backend_over_suite(self, name, brightness_inputs):
        op = parse_method(name, BACKENDS[name]).build(seed=0)
        for img in brightness_inputs:
            assert np.all(op(img).data >= img.data - BRIGHTNESS_TOL)
            assert np.all(dehret(img, op).data <= img.data + BRIGHTNESS_TOL)


@pytest.mark.slow
class TestHazyCorpusDirection:
    """Dehazing helps on a generated corpus and beats histogram equalisation."""

    METHODS = ("dcp", "dehret:msr", "dehret:rsr", "dehret:hf")

    @pytest.fixture(scope="class")
    def corpus(self):
        return synth_corpus(10, 64, 64, seed=2024)

    @pytest.fixture(scope="class")
    def he_mean_cpsnr(self, corpus) -> float:
        op = parse_method("he").build(seed=0)
        return float(np.mean([cpsnr(op(s.hazy), s.ground_truth) for s in corpus]))

    @pytest.mark.parametrize("method", METHODS)
    def test_method(self, method, corpus, he_mean_cpsnr):
        op = parse_method(method).build(seed=0)
        improved, psnrs = 0, []
        for s in corpus:
            out = op(s.hazy)
            improved += ssim(out, s.ground_truth) > ssim(s.hazy, s.ground_truth)
            psnrs.append(cpsnr(out, s.ground_truth))
        assert improved >= 8
        assert np.mean(psnrs) > he_mean_cpsnr


@pytest.mark.integration
class TestBatchDeterminism:
    def test_worker_count_does_not_change_outputs(self, tmp_path):
        src = tmp_path / "in"
        for s in synth_corpus(6, 32, 32, seed=5):
            save_image(s.hazy, src / f"{s.id}.png")
        argv = ["--log-level", "ERROR", "enhance", "--method", "dehret:rsr", "--param", "n=10", "--param", "sprays=3"]
        assert main([*argv, "--workers", "1", str(src), str(tmp_path / "serial")]) == 0
        assert main([*argv, "--workers", "4", str(src), str(tmp_path / "parallel")]) == 0
        assert main(["--log-level", "ERROR", "replay", str(tmp_path / "parallel.manifest")]) == 0
        for path in sorted((tmp_path / "serial").glob("*.png")):
            assert path.read_bytes() == (tmp_path / "parallel" / path.name).read_bytes()


@pytest.mark.slow
class TestSpeed:
    """Full-size images finish within a desktop budget."""

    @pytest.mark.parametrize(
        ("method", "overrides"),
        [("msr", []), ("dcp", ["refine=true"]), ("dehret:rsr", ["n=75", "sprays=20"])],
    )
    def test_512_rgb(self, method, overrides):
        op = parse_method(method, overrides).build(seed=0)
        op(ImageF(np.random.default_rng(0).uniform(size=(3, 16, 16))))  # compile
        img = ImageF(np.random.default_rng(1).uniform(size=(3, 512, 512)))
        started = time.perf_counter()
        op(img)
        assert time.perf_counter() - started < 10.0
