from __future__ import annotations

import csv
import math
import os
import pathlib
import typing as t

import numpy as np

from codbench.config.model.backbone import BackboneConfig
from codbench.config.model.sinet import SinetConfig
from codbench.config.model.train import TrainConfig
from codbench.exceptions import ValidationError
from codbench.helper.mixin import LoggingMixin
from codbench.lib.loss import total_loss
from codbench.lib.nn import SinetParams
from codbench.lib.nn import init_sinet_params
from codbench.lib.nn import sinet_forward
from codbench.lib.nn.backbone import STRIDE
from codbench.lib.tensor import Array
from codbench.lib.tensor import Tape
from codbench.lib.tensor import Tensor
from codbench.lib.tensor import backward
from codbench.lib.toy import SegmentationSet

StepCallback = t.Callable[[int, float], None]


def normalize_images(images: Array, config: SinetConfig) -> Array:
    """Standardize N x 3 x H x W RGB values in [0, 1] channel-wise."""
    mean = np.asarray(config.image_mean)[None, :, None, None]
    std = np.asarray(config.image_std)[None, :, None, None]
    return (images - mean) / std


class Adam:
    """Adam with bias correction and optional element-wise clipping of
    the incoming gradients.

    Moments are kept per parameter name; parameters without a gradient
    in a step are left untouched.
    """

    def __init__(
        self,
        *,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
        clip: float | None = None,
    ) -> None:
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.clip = clip
        self.step_count = 0
        self.m: dict[str, Array] = {}
        self.v: dict[str, Array] = {}

    def step(self, params: t.Mapping[str, Array], grads: t.Mapping[str, Array], lr: float) -> dict[str, Array]:
        self.step_count += 1
        b1, b2, n = self.beta1, self.beta2, self.step_count
        updated: dict[str, Array] = {}
        for name, value in params.items():
            grad = grads.get(name)
            if grad is None:
                updated[name] = value
                continue
            if self.clip is not None:
                grad = np.clip(grad, -self.clip, self.clip)
            m = b1 * self.m.get(name, 0.0) + (1.0 - b1) * grad
            v = b2 * self.v.get(name, 0.0) + (1.0 - b2) * grad * grad
            self.m[name], self.v[name] = m, v
            m_hat = m / (1.0 - b1**n)
            v_hat = v / (1.0 - b2**n)
            updated[name] = value - lr * m_hat / (np.sqrt(v_hat) + self.eps)
        return updated


class TrainResult(t.NamedTuple):
    params: SinetParams
    losses: list[float]
    train_iou: float
    steps: int


def learning_rate(config: TrainConfig, epoch: int) -> float:
    """Step decay: multiply by `decay_rate` every `decay_epochs` epochs."""
    return config.lr * config.decay_rate ** (epoch // config.decay_epochs)


def mask_iou(pred: Array, mask: Array) -> float:
    """Mean IoU of binary N x 1 x H x W maps; an empty union scores 1."""
    p = pred.reshape(pred.shape[0], -1).astype(bool)
    g = mask.reshape(mask.shape[0], -1).astype(bool)
    inter = (p & g).sum(axis=1)
    union = (p | g).sum(axis=1)
    return float(np.mean(np.where(union > 0, inter / np.maximum(union, 1), 1.0)))


class Trainer(LoggingMixin):
    """Mini-batch Adam training of the whole network with deep supervision.

    Example:
        ```python
        data = make_blob_dataset(n=32, size=64, seed=0)
        trainer = Trainer(TrainConfig(batch_size=8, lr=1e-3, max_steps=300))
        result = trainer.fit(data)
        result.losses[-1] < result.losses[0]
        ```
    """

    __logtag__ = "codbench.lib.train"

    def __init__(
        self,
        config: TrainConfig | None = None,
        *,
        sinet: SinetConfig | None = None,
        backbone: BackboneConfig | None = None,
    ) -> None:
        self.sinet = sinet or SinetConfig()
        super().__init__(variant=self.sinet.label)
        self.config = config or TrainConfig()
        self.backbone = backbone or BackboneConfig()

    def fit(
        self,
        dataset: SegmentationSet,
        params: SinetParams | None = None,
        *,
        on_step: StepCallback | None = None,
    ) -> TrainResult:
        """Train and report the per-step loss and final training IoU.

        Args:
            dataset: Training pairs; height and width divisible by 32.
            params: Starting parameters; freshly initialized when omitted.
            on_step: Called with (step, loss) after every update.

        Returns:
            Trained parameters, loss curve, training IoU at threshold 0.5
            and the number of steps taken.

        Raises:
            ValidationError: On an empty or incompatible dataset.
        """
        self._check(dataset)
        cfg = self.config
        if params is None:
            params = init_sinet_params(self.sinet, self.backbone)
        sinet = params.sinet

        rng = np.random.default_rng(cfg.seed)
        adam = Adam(betas=cfg.betas, eps=cfg.adam_eps, clip=cfg.clip)
        n = len(dataset)
        batches = math.ceil(n / cfg.batch_size)
        losses: list[float] = []
        self.logger.info(
            f"Training {sinet.label} on {n} images: {cfg.epochs} epochs x {batches} batches"
            + (f", capped at {cfg.max_steps} steps" if cfg.max_steps else "")
        )

        for epoch in range(cfg.epochs):
            lr = learning_rate(cfg, epoch)
            order = rng.permutation(n)
            for start in range(0, n, cfg.batch_size):
                batch = dataset.subset(order[start : start + cfg.batch_size])
                image = Tensor(normalize_images(batch.images, sinet))
                with Tape() as tape:
                    outputs = sinet_forward(image, params, training=True)
                    loss = total_loss(outputs.upsampled, batch.masks)
                grads = backward(tape, loss).named()
                arrays = adam.step({k: v.data for k, v in params.tensors.items()}, grads, lr)
                params = params.with_arrays(arrays).replace(buffers=outputs.buffers)

                value = loss.item()
                losses.append(value)
                self.logger.debug(f"step {len(losses)} epoch {epoch} lr {lr:.2e} loss {value:.5f}")
                if on_step is not None:
                    on_step(len(losses), value)
                if cfg.max_steps is not None and len(losses) >= cfg.max_steps:
                    break
            self.logger.info(f"Epoch {epoch}: last loss {losses[-1]:.5f}")
            if cfg.max_steps is not None and len(losses) >= cfg.max_steps:
                break

        iou = self.evaluate_iou(dataset, params)
        self.logger.info(f"Finished after {len(losses)} steps, training IoU {iou:.3f}")
        return TrainResult(params=params, losses=losses, train_iou=iou, steps=len(losses))

    def evaluate_iou(self, dataset: SegmentationSet, params: SinetParams, threshold: float = 0.5) -> float:
        """Training-set IoU of sigmoid(C_3 at input size) >= threshold."""
        preds = []
        for start in range(0, len(dataset), self.config.batch_size):
            batch = dataset.subset(range(start, min(start + self.config.batch_size, len(dataset))))
            out = sinet_forward(Tensor(normalize_images(batch.images, params.sinet)), params)
            # logit >= log(t / (1 - t)) is sigmoid >= t
            preds.append(out.c3_up.data >= np.log(threshold / (1.0 - threshold)))
        return mask_iou(np.concatenate(preds), dataset.masks)

    def _check(self, dataset: SegmentationSet) -> None:
        if len(dataset) == 0:
            raise ValidationError(reason="cannot train on an empty dataset")
        h, w = dataset.images.shape[2:]
        if h % STRIDE or w % STRIDE:
            raise ValidationError(reason=f"training images must have sides divisible by {STRIDE}, got {h}x{w}")
        if dataset.masks.shape != (len(dataset), 1, h, w):
            raise ValidationError(reason=f"mask shape {dataset.masks.shape} does not match images {dataset.images.shape}")


def train(
    dataset: SegmentationSet,
    config: TrainConfig | None = None,
    *,
    sinet: SinetConfig | None = None,
    backbone: BackboneConfig | None = None,
    params: SinetParams | None = None,
) -> TrainResult:
    return Trainer(config, sinet=sinet, backbone=backbone).fit(dataset, params)


def write_loss_curve(losses: t.Sequence[float], path: str | os.PathLike[str]) -> pathlib.Path:
    """Write the loss curve as CSV with columns `step,loss`."""
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["step", "loss"])
        for step, value in enumerate(losses, start=1):
            writer.writerow([step, repr(float(value))])
    return path
