from __future__ import annotations

from dataclasses import dataclass
import os
import pathlib
import typing as t

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from codbench.exceptions import ValidationError
from codbench.lib import imageio
from codbench.lib.tensor import Array


@dataclass(frozen=True)
class SegmentationSet:
    """In-memory training pairs.

    Attributes:
        images: N x 3 x H x W RGB values in [0, 1].
        masks: N x 1 x H x W binary masks.
        names: Optional per-sample names.
    """

    images: Array
    masks: Array
    names: tuple[str, ...] = ()

    def __len__(self) -> int:
        return int(self.images.shape[0])

    def subset(self, index: t.Sequence[int] | Array) -> SegmentationSet:
        idx = np.asarray(index, dtype=np.intp)
        names = tuple(self.names[i] for i in idx) if self.names else ()
        return SegmentationSet(self.images[idx], self.masks[idx], names)


def _texture(rng: np.random.Generator, size: int, sigma: float) -> Array:
    noise = rng.standard_normal((3, size, size))
    smooth = ndimage.gaussian_filter(noise, sigma=(0, sigma, sigma), mode="wrap")
    return smooth / (np.abs(smooth).max() + 1e-12)


def make_blob_dataset(
    n: int = 32,
    size: int = 64,
    seed: int = 0,
    *,
    contrast: float = 0.18,
    texture_sigma: float = 1.5,
) -> SegmentationSet:
    """Seeded synthetic camouflage set: one elliptical blob per image whose
    colour differs slightly from a smoothed-noise background texture.

    Args:
        n: Number of images.
        size: Square side; must be divisible by 32.
        seed: Generator seed; equal seeds give identical sets.
        contrast: Colour offset of the blob against the background.
        texture_sigma: Gaussian smoothing of the texture noise.

    Returns:
        The images and masks.
    """
    if n < 1:
        raise ValidationError(reason=f"blob dataset needs n >= 1, got {n}")
    if size < 32 or size % 32:
        raise ValidationError(reason=f"blob dataset size must be a positive multiple of 32, got {size}")

    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    images = np.empty((n, 3, size, size))
    masks = np.empty((n, 1, size, size))
    for i in range(n):
        base = rng.uniform(0.35, 0.65, size=3)
        offset = rng.standard_normal(3)
        offset *= contrast / np.linalg.norm(offset)

        cy, cx = rng.uniform(0.3, 0.7, size=2) * size
        ay, ax = rng.uniform(0.12, 0.28, size=2) * size
        theta = rng.uniform(0.0, np.pi)
        dy, dx = yy - cy, xx - cx
        u = dx * np.cos(theta) + dy * np.sin(theta)
        v = -dx * np.sin(theta) + dy * np.cos(theta)
        blob = (u / ax) ** 2 + (v / ay) ** 2 <= 1.0

        background = base[:, None, None] + 0.12 * _texture(rng, size, texture_sigma)
        foreground = base[:, None, None] + offset[:, None, None] + 0.12 * _texture(rng, size, texture_sigma)
        images[i] = np.clip(np.where(blob[None], foreground, background), 0.0, 1.0)
        masks[i, 0] = blob

    names = tuple(f"blob-{i:04d}" for i in range(n))
    return SegmentationSet(images, masks, names)


def quantized_images(dataset: SegmentationSet) -> npt.NDArray[np.uint8]:
    """N x H x W x 3 uint8 copies of the images, as they would be stored
    on disk."""
    return imageio.to_uint8(dataset.images.transpose(0, 2, 3, 1))


def export_dataset(dataset: SegmentationSet, root: str | os.PathLike[str]) -> pathlib.Path:
    """Write the set as `root/Imgs/<name>.png` and `root/GT/<name>.png`
    so it can be evaluated like any other dataset."""
    root = pathlib.Path(root)
    names = dataset.names or tuple(f"sample-{i:04d}" for i in range(len(dataset)))
    for name, rgb, mask in zip(names, quantized_images(dataset), dataset.masks, strict=True):
        imageio.write_rgb(root / "Imgs" / f"{name}.png", rgb)
        imageio.write_mask(root / "GT" / f"{name}.png", mask[0] > 0.5)
    return root
