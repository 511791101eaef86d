from __future__ import annotations

import concurrent.futures as cf
import os
import pathlib

import numpy as np
import numpy.typing as npt

from codbench.config import Config
from codbench.exceptions import DataIOError
from codbench.exceptions import ValidationError
from codbench.lib import imageio
from codbench.lib.nn import SinetParams
from codbench.lib.nn import load_weights
from codbench.lib.nn import sinet_forward
from codbench.lib.tensor import Array
from codbench.lib.tensor import Tensor
from codbench.lib.tensor import sigmoid
from codbench.lib.train import normalize_images
from codbench.service import BaseService
from codbench.service.decorators import log_call
from codbench.service.inference.types import InferenceResult


class InferenceEngine(BaseService):
    """Turns RGB images into camouflage maps with trained parameters.

    Each image is resized to the square input size of the network, run
    through one forward pass, and sigmoid(C_3) is resized back to the
    original height and width. There is no post-processing, so equal
    weights and images always give byte-identical files.
    """

    def __init__(self, config: Config, params: SinetParams, *, weights: pathlib.Path | None = None) -> None:
        super().__init__(config)
        self.params = params
        self.weights = weights

    @classmethod
    def from_weights(cls, config: Config, path: str | os.PathLike[str]) -> InferenceEngine:
        """Load a weight file; the architecture comes from its metadata.

        Raises:
            WeightFileError: On a corrupt file.
            WeightVersionError: On an unsupported container version.
        """
        path = pathlib.Path(path)
        return cls(config, load_weights(path), weights=path)

    @property
    def input_size(self) -> int:
        return self.params.sinet.input_size

    def predict(self, rgb: npt.NDArray[np.uint8]) -> Array:
        """Probability map in [0, 1] with the height and width of `rgb`."""
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise ValidationError(reason=f"expected an H x W x 3 image, got shape {rgb.shape}")
        size = self.input_size
        resized = imageio.resize_rgb(rgb, (size, size)).astype(np.float64) / 255.0
        batch = normalize_images(resized.transpose(2, 0, 1)[None], self.params.sinet)
        out = sinet_forward(Tensor(batch), self.params)
        prob = sigmoid(out.c3_up).data[0, 0]
        return imageio.resize_map(prob, (rgb.shape[0], rgb.shape[1]))

    @log_call
    def run(self, image_dir: str | os.PathLike[str], out_dir: str | os.PathLike[str]) -> InferenceResult:
        """Write `<stem>.png` into `out_dir` for every image of `image_dir`.

        Raises:
            DataIOError: When the directory or an image cannot be read.
            ValidationError: When two images share a file stem.
        """
        image_dir, out_dir = pathlib.Path(image_dir), pathlib.Path(out_dir)
        if not image_dir.is_dir():
            raise DataIOError(path=str(image_dir), reason="image directory not found")
        files = sorted(p for p in image_dir.iterdir() if p.is_file() and imageio.is_image_file(p))
        stems = [p.stem for p in files]
        if len(set(stems)) != len(stems):
            dupes = sorted({s for s in stems if stems.count(s) > 1})
            raise ValidationError(reason=f"several images share the stem(s) {', '.join(dupes)}")
        if not files:
            self.logger.warning(f"No images found in {image_dir}")

        self.logger.info(
            f"Predicting {len(files)} image(s) at {self.input_size}x{self.input_size} "
            f"with {self.params.sinet.label} on {self.threads} worker(s)"
        )
        jobs = [(p, out_dir / f"{p.stem}.png") for p in files]
        if self.threads > 1 and len(jobs) > 1:
            with cf.ThreadPoolExecutor(max_workers=self.threads) as pool:
                outputs = list(pool.map(self._predict_file, jobs))
        else:
            outputs = [self._predict_file(job) for job in jobs]
        return InferenceResult(outputs=outputs, weights=self.weights, variant=self.params.sinet.label)

    def _predict_file(self, job: tuple[pathlib.Path, pathlib.Path]) -> pathlib.Path:
        src, dst = job
        self.logger.debug(f"Predicting {src.name}")
        return imageio.write_gray(dst, self.predict(imageio.read_rgb(src)))
