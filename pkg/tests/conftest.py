from __future__ import annotations

import pathlib
import tempfile
import typing as t

from loguru import logger
import numpy as np
import pytest

from codbench.config import Config
from codbench.config import setconfig
from codbench.config.model.backbone import BackboneConfig
from codbench.config.model.sinet import SinetConfig
from codbench.lib import imageio
from codbench.lib.nn import init_sinet_params
from codbench.lib.tensor import Tape
from codbench.lib.tensor import Tensor
from codbench.lib.tensor import backward
from codbench.lib.tensor import runtime


@pytest.fixture
def temp_dir():
    """Provide a temporary directory."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield pathlib.Path(tmpdir)


@pytest.fixture(autouse=True)
def tensor_runtime():
    """Run every test in float64 without debug checks, whatever a CLI
    run configured."""
    with runtime.precision("float64"), runtime.debug_checks(False):
        yield
    logger.remove()
    setconfig(None)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def tiny_sinet():
    """Narrow network for fast forward passes."""
    return SinetConfig(channels=8, groups=(8, 4, 1), input_size=64)


@pytest.fixture
def tiny_backbone():
    return BackboneConfig(stem_channels=4, stage_channels=(6, 8, 8, 12))


@pytest.fixture
def tiny_params(tiny_sinet, tiny_backbone):
    return init_sinet_params(tiny_sinet, tiny_backbone, seed=0)


@pytest.fixture
def config(tiny_sinet, tiny_backbone):
    """Single-threaded configuration with the narrow network."""
    return Config.from_mapping(
        {
            "core": {"runtime": {"threads": 1}},
            "model": {
                "sinet": tiny_sinet.model_dump(),
                "backbone": tiny_backbone.model_dump(),
            },
        }
    )


@pytest.fixture
def write_dataset(temp_dir):
    """Factory writing `Imgs/` + `GT/` datasets from in-memory masks.

    Images are random RGB unless given.
    """

    def write(
        masks: t.Mapping[str, np.ndarray],
        *,
        name: str = "toyset",
        images: t.Mapping[str, np.ndarray] | None = None,
        with_images: bool = True,
    ) -> pathlib.Path:
        root = temp_dir / name
        gen = np.random.default_rng(1)
        (root / "GT").mkdir(parents=True, exist_ok=True)
        for stem, mask in masks.items():
            imageio.write_mask(root / "GT" / f"{stem}.png", mask)
            if with_images:
                rgb = images[stem] if images else gen.integers(0, 256, size=(*mask.shape, 3), dtype=np.uint8)
                imageio.write_rgb(root / "Imgs" / f"{stem}.png", rgb)
        return root

    return write


@pytest.fixture
def gradcheck():
    """Compare tape gradients with central differences.

    Returns a function `(fn, arrays, h=1e-6) -> relative error` where
    `fn` maps tensors to a scalar tensor.
    """

    def check(
        fn: t.Callable[..., Tensor],
        arrays: t.Sequence[np.ndarray],
        *,
        h: float = 1e-6,
        coords: int | None = None,
    ) -> float:
        leaves = [Tensor.parameter(a) for a in arrays]
        with Tape() as tape:
            loss = fn(*leaves)
        grads = backward(tape, loss)

        pick = np.random.default_rng(7)
        analytic, numeric = [], []
        for i, (leaf, arr) in enumerate(zip(leaves, arrays, strict=True)):
            g = grads[leaf] if leaf in grads else np.zeros_like(arr)
            indices = list(np.ndindex(arr.shape))
            if coords is not None and len(indices) > coords:
                indices = [indices[j] for j in pick.choice(len(indices), coords, replace=False)]
            for idx in indices:
                values = []
                for sign in (1.0, -1.0):
                    shifted = np.array(arr, dtype=np.float64)
                    shifted[idx] += sign * h
                    inputs = [Tensor(shifted) if j == i else Tensor(a) for j, a in enumerate(arrays)]
                    values.append(fn(*inputs).item())
                numeric.append((values[0] - values[1]) / (2.0 * h))
                analytic.append(float(g[idx]))
        a, n = np.asarray(analytic), np.asarray(numeric)
        scale = np.linalg.norm(a) + np.linalg.norm(n)
        return float(np.linalg.norm(a - n) / scale) if scale > 0 else 0.0

    return check
