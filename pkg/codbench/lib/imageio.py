from __future__ import annotations

import os
import pathlib

import numpy as np
import numpy.typing as npt
from PIL import Image
from PIL import UnidentifiedImageError

from codbench.exceptions import DataIOError
from codbench.lib.tensor import Array

IMAGE_SUFFIXES = frozenset({".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"})
MASK_THRESHOLD = 127


def is_image_file(path: str | os.PathLike[str]) -> bool:
    return pathlib.Path(path).suffix.lower() in IMAGE_SUFFIXES


def _open(path: str | os.PathLike[str], mode: str) -> Image.Image:
    try:
        with Image.open(path) as img:
            img.load()
            return img.convert(mode)
    except (OSError, UnidentifiedImageError) as e:
        raise DataIOError(path=str(path), reason=f"unreadable image: {e}") from e


def image_size(path: str | os.PathLike[str]) -> tuple[int, int]:
    """(height, width) without decoding the pixels."""
    try:
        with Image.open(path) as img:
            w, h = img.size
    except (OSError, UnidentifiedImageError) as e:
        raise DataIOError(path=str(path), reason=f"unreadable image: {e}") from e
    return h, w


def read_rgb(path: str | os.PathLike[str]) -> npt.NDArray[np.uint8]:
    """H x W x 3 uint8."""
    return np.asarray(_open(path, "RGB"), dtype=np.uint8)


def read_gray(path: str | os.PathLike[str], size: tuple[int, int] | None = None) -> npt.NDArray[np.uint8]:
    """8-bit grayscale, optionally bilinear-resized to `size = (h, w)`."""
    img = _open(path, "L")
    if size is not None and (img.height, img.width) != size:
        img = img.resize((size[1], size[0]), Image.Resampling.BILINEAR)
    return np.asarray(img, dtype=np.uint8)


def read_prediction(path: str | os.PathLike[str], size: tuple[int, int] | None = None) -> Array:
    """Prediction map in [0, 1] from an 8-bit grayscale file."""
    return read_gray(path, size).astype(np.float64) / 255.0


def read_mask(path: str | os.PathLike[str], threshold: int = MASK_THRESHOLD) -> npt.NDArray[np.bool_]:
    """Binary ground truth: pixels brighter than `threshold`."""
    return read_gray(path) > threshold


def resize_rgb(rgb: npt.NDArray[np.uint8], size: tuple[int, int]) -> npt.NDArray[np.uint8]:
    img = Image.fromarray(rgb)
    return np.asarray(img.resize((size[1], size[0]), Image.Resampling.BILINEAR), dtype=np.uint8)


def resize_map(values: npt.ArrayLike, size: tuple[int, int]) -> Array:
    """Bilinear resize of a 2-D float map to `size = (h, w)`."""
    arr = np.asarray(values, dtype=np.float32)
    if arr.shape == size:
        return arr.astype(np.float64)
    img = Image.fromarray(arr).resize((size[1], size[0]), Image.Resampling.BILINEAR)
    return np.asarray(img, dtype=np.float64)


def to_uint8(values: npt.ArrayLike) -> npt.NDArray[np.uint8]:
    """Quantize a [0, 1] map to 8 bits, rounding half to even."""
    return np.clip(np.rint(np.asarray(values, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)


def write_gray(path: str | os.PathLike[str], values: npt.ArrayLike) -> pathlib.Path:
    """Write a 2-D map as 8-bit grayscale PNG; float input is taken as
    [0, 1], integer input as 0..255."""
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise DataIOError(path=str(path), reason=f"expected a 2-D map, got shape {arr.shape}")
    data = arr.astype(np.uint8) if np.issubdtype(arr.dtype, np.integer) else to_uint8(arr)
    path = pathlib.Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(data).save(path, format="PNG")
    except OSError as e:
        raise DataIOError(path=str(path), reason=str(e)) from e
    return path


def write_mask(path: str | os.PathLike[str], mask: npt.ArrayLike) -> pathlib.Path:
    return write_gray(path, np.asarray(mask, dtype=bool).astype(np.uint8) * 255)


def write_rgb(path: str | os.PathLike[str], rgb: npt.ArrayLike) -> pathlib.Path:
    arr = np.asarray(rgb)
    data = arr.astype(np.uint8) if np.issubdtype(arr.dtype, np.integer) else to_uint8(arr)
    path = pathlib.Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(data).save(path)
    except OSError as e:
        raise DataIOError(path=str(path), reason=str(e)) from e
    return path
