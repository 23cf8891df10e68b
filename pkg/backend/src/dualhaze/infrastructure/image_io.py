"""
PNG / PGM / PPM load and store through OpenCV.

Integer samples are scaled by 1 / (2^bits - 1) on load and rounded half-up on
store. Colour files are flipped between the BGR order OpenCV uses and RGB.
"""

from pathlib import Path

import cv2
import numpy as np
import structlog

from dualhaze.core.config import settings
from dualhaze.core.errors import ErrorCode, ImageIOError
from dualhaze.core.image import ImageF
from dualhaze.domain.dehaze.models import TransmissionMap
from dualhaze.domain.synth.models import DepthField

logger = structlog.get_logger(__name__)

IMAGE_SUFFIXES = frozenset({".png", ".pgm", ".ppm", ".pnm"})
_MAX_BY_DTYPE = {np.dtype(np.uint8): 255.0, np.dtype(np.uint16): 65535.0}


def _check_suffix(path: Path) -> None:
    if path.suffix.lower() not in IMAGE_SUFFIXES:
        raise ImageIOError(
            code=ErrorCode.IO_UNSUPPORTED_FORMAT,
            message=f"Unsupported image format '{path.suffix}' for {path}",
            details={"supported": sorted(IMAGE_SUFFIXES)},
        )


def _read_raw(path: Path) -> np.ndarray:
    if not path.is_file():
        raise ImageIOError(code=ErrorCode.IO_NOT_FOUND, message=f"No such image file: {path}")
    _check_suffix(path)
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise ImageIOError(code=ErrorCode.IO_DECODE_FAILED, message=f"Could not decode image: {path}")
    if raw.dtype not in _MAX_BY_DTYPE:
        raise ImageIOError(
            code=ErrorCode.IO_UNSUPPORTED_FORMAT,
            message=f"Unsupported sample type {raw.dtype} in {path}",
        )
    return raw


def load_image(path: str | Path) -> ImageF:
    """Read an 8/16-bit gray or RGB image as an ImageF in [0, 1]."""
    path = Path(path)
    raw = _read_raw(path)
    scaled = raw.astype(np.float64) / _MAX_BY_DTYPE[raw.dtype]
    if scaled.ndim == 3:
        if scaled.shape[2] != 3:
            raise ImageIOError(
                code=ErrorCode.IO_UNSUPPORTED_FORMAT,
                message=f"Expected gray or RGB image, got {scaled.shape[2]} channels in {path}",
            )
        scaled = scaled[:, :, ::-1]
    img = ImageF.from_hwc(scaled)
    logger.debug("image_loaded", path=str(path), shape=img.shape, dtype=str(raw.dtype))
    return img


def quantize(arr: np.ndarray, bits: int) -> np.ndarray:
    """Round half-up to unsigned integers of the given bit depth."""
    max_value = (1 << bits) - 1
    dtype = np.uint8 if bits == 8 else np.uint16
    return np.floor(np.clip(arr, 0.0, 1.0) * max_value + 0.5).astype(dtype)


def _write(path: Path, arr: np.ndarray) -> None:
    _check_suffix(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        ok = cv2.imwrite(str(path), arr)
    except cv2.error as e:
        raise ImageIOError(
            code=ErrorCode.IO_ENCODE_FAILED,
            message=f"Could not write image: {path}",
            original_error=e,
        ) from None
    if not ok:
        raise ImageIOError(code=ErrorCode.IO_ENCODE_FAILED, message=f"Could not write image: {path}")


def save_image(img: ImageF, path: str | Path, bits: int | None = None) -> Path:
    """Write an ImageF as 8- or 16-bit PNG / PGM / PPM."""
    path = Path(path)
    bits = bits or settings.PNG_BITS
    if bits not in (8, 16):
        raise ImageIOError(code=ErrorCode.IO_UNSUPPORTED_FORMAT, message=f"Unsupported bit depth {bits}")
    out = quantize(img.to_hwc(), bits)
    if out.ndim == 3:
        out = np.ascontiguousarray(out[:, :, ::-1])
    _write(path, out)
    logger.debug("image_saved", path=str(path), bits=bits)
    return path


def save_transmission(t: TransmissionMap, path: str | Path) -> Path:
    """Transmission maps are stored as 16-bit gray images."""
    return save_image(t.as_image(), path, bits=16)


def load_transmission(path: str | Path) -> TransmissionMap:
    return TransmissionMap(load_image(path).data[0])


def load_depth(path: str | Path) -> DepthField:
    """Read an 8/16-bit gray depth map, scaled to relative depth in [0, 1]."""
    path = Path(path)
    raw = _read_raw(path)
    if raw.ndim != 2:
        raise ImageIOError(
            code=ErrorCode.IO_UNSUPPORTED_FORMAT,
            message=f"Depth map must be single-channel: {path}",
        )
    return DepthField(raw.astype(np.float64) / _MAX_BY_DTYPE[raw.dtype])


def save_depth(depth: DepthField, path: str | Path) -> Path:
    """Write a depth map as 16-bit PGM, normalised by its maximum when that exceeds 1."""
    path = Path(path)
    data = depth.data
    peak = float(data.max())
    if peak > 1.0:
        data = data / peak
    _write(path, quantize(data, 16))
    return path


def list_images(directory: str | Path) -> list[Path]:
    """Image files directly inside `directory`, sorted by path."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ImageIOError(code=ErrorCode.IO_NOT_FOUND, message=f"No such directory: {directory}")
    paths = sorted(p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)
    if not paths:
        raise ImageIOError(code=ErrorCode.IO_EMPTY_INPUT, message=f"No images found in {directory}")
    return paths


def collect_images(source: str | Path) -> list[Path]:
    """A single image file or every image in a directory."""
    source = Path(source)
    if source.is_dir():
        return list_images(source)
    if not source.exists():
        raise ImageIOError(code=ErrorCode.IO_NOT_FOUND, message=f"No such file or directory: {source}")
    _check_suffix(source)
    return [source]
