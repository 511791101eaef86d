from __future__ import annotations

import pathlib

from pydantic import Field

from codbench.cli.args import RunArgs
from codbench.cli.helper import display


class Args(RunArgs):
    """Predict camouflage maps for a directory of images.

    Each image is resized to the network input size, and sigmoid(C_3) is
    resized back and written as an 8-bit grayscale PNG named after the
    image.
    """

    weights: pathlib.Path = Field(
        alias="w",
        description="Weight file written by train-toy.",
    )

    images: pathlib.Path = Field(
        alias="i",
        description="Directory of input images.",
    )

    out: pathlib.Path = Field(
        alias="o",
        description="Directory the prediction PNGs are written to.",
    )

    def run(self) -> None:
        from codbench.service.inference import InferenceEngine

        cfg = self.load_config()
        display.banner("Inference", subtitle=str(self.images))

        with display.loading("Loading weights"):
            engine = InferenceEngine.from_weights(cfg, self.weights)

        with display.section("Network"):
            display.key_value(
                {
                    "Variant": engine.params.sinet.label,
                    "Input size": f"{engine.input_size}x{engine.input_size}",
                    "Parameters": engine.params.num_parameters(),
                    "Threads": engine.threads,
                }
            )

        with display.loading(f"Predicting images of {self.images}"):
            result = engine.run(self.images, self.out)

        display.success(f"Wrote {len(result.outputs)} prediction(s) to {self.out}")
