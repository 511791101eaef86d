from __future__ import annotations

import itertools
import os
import typing as t

import numpy as np
import pydantic as pyd

from codbench.config import Config
from codbench.config.model.sinet import SinetConfig
from codbench.config.model.train import TrainConfig
from codbench.exceptions import ValidationError
from codbench.lib import imageio
from codbench.lib.metrics import EvalPair
from codbench.lib.metrics import MetricReport
from codbench.lib.report import FORMATS
from codbench.lib.report import Format
from codbench.lib.report import ReportRenderer
from codbench.lib.report import dataset_table
from codbench.lib.toy import SegmentationSet
from codbench.lib.toy import make_blob_dataset
from codbench.lib.toy import quantized_images
from codbench.lib.train import Trainer
from codbench.service import BaseService
from codbench.service.ablation import const
from codbench.service.ablation.types import AblationGrid
from codbench.service.ablation.types import AblationResult
from codbench.service.ablation.types import AblationVariant
from codbench.service.ablation.types import groups_text
from codbench.service.ablation.types import reverse_flags
from codbench.service.decorators import log_call
from codbench.service.evaluation import EvaluationService
from codbench.service.inference import InferenceEngine
from codbench.service.training import ToyTrainingService
from codbench.service.training import const as toy


class AblationRunner(BaseService):
    """Trains and scores architecture variants on the toy set.

    Every variant starts from the same seed and sees the same batches;
    predictions go through the same 8-bit quantization as files written
    by inference, so the default row equals a standalone
    train-toy, infer and eval run with that seed.
    """

    def __init__(self, config: Config | None = None) -> None:
        super().__init__(config)
        self.toy = ToyTrainingService(self.config)
        self.evaluation = EvaluationService(self.config)

    # ============================================================================
    # Variants
    # ============================================================================

    def variants(self, grid: AblationGrid, base: SinetConfig) -> list[AblationVariant]:
        """Expand the grid into validated, uniquely configured variants.

        Raises:
            ValidationError: Naming the first entry the network rejects,
                before anything is trained.
        """
        if grid.mode == "cartesian":
            changes = [
                ({"decoder": d, "tem_style": c, "reverse": reverse_flags(r), "groups": g}, None)
                for d, c, r, g in itertools.product(grid.decoder, grid.tem_style, grid.reverse, grid.groups)
            ]
        else:
            changes = [({}, const.DEFAULT_ROW)]
            changes += [({"decoder": d}, f"decoder={d}") for d in grid.decoder]
            changes += [({"tem_style": c}, f"conv={c}") for c in grid.tem_style]
            changes += [({"reverse": reverse_flags(r)}, f"reverse={r}") for r in grid.reverse]
            changes += [({"groups": g}, f"groups={groups_text(g)}") for g in grid.groups]
        if grid.removals:
            changes += [({"decoder": "none"}, const.WITHOUT_NCD), ({"tem_style": "none"}, const.WITHOUT_TEM)]

        variants: list[AblationVariant] = []
        seen: set[SinetConfig] = set()
        for change, name in changes:
            sinet = self._variant(base, change, name)
            if sinet in seen:
                continue
            seen.add(sinet)
            variants.append(AblationVariant(name=name or sinet.label, sinet=sinet))
        self.logger.info(f"{grid.mode} grid expands to {len(variants)} variant(s)")
        return variants

    @staticmethod
    def _variant(base: SinetConfig, change: dict[str, t.Any], name: str | None) -> SinetConfig:
        try:
            return base.variant(**change)
        except (pyd.ValidationError, ValueError) as e:
            entry = name or ", ".join(f"{k}={v}" for k, v in change.items())
            raise ValidationError(reason=f"invalid ablation entry {entry}: {e}") from e

    # ============================================================================
    # Runs
    # ============================================================================

    @log_call
    def run(
        self,
        grid: AblationGrid,
        out_dir: str | os.PathLike[str] | None = None,
        *,
        images: int = toy.TOY_IMAGES,
        size: int = toy.TOY_SIZE,
        lr: float | None = None,
        batch_size: int | None = None,
        max_steps: int | None = None,
        epochs: int | None = None,
        formats: t.Iterable[Format] = FORMATS,
    ) -> AblationResult:
        """Train every variant and tabulate the four metrics.

        Raises:
            ValidationError: On an invalid grid entry; nothing is trained.
        """
        variants = self.variants(grid, self.toy.toy_sinet(size))
        train_cfg = self.toy.toy_train(lr=lr, batch_size=batch_size, max_steps=max_steps, epochs=epochs)
        seed = self.seed if self.seed is not None else 0
        dataset = make_blob_dataset(images, size, seed)

        reports = []
        for i, variant in enumerate(variants, start=1):
            self.logger.info(f"[{i}/{len(variants)}] {variant.name}: {variant.sinet.label}")
            reports.append(self.score_variant(variant, dataset, train_cfg))

        table = dataset_table(reports, title=const.TABLE_TITLE)
        files = ReportRenderer().write(table, out_dir, const.OUTPUT_STEM, formats) if out_dir is not None else []
        return AblationResult(table=table, reports=reports, files=files)

    def score_variant(
        self,
        variant: AblationVariant,
        dataset: SegmentationSet,
        train_cfg: TrainConfig,
    ) -> MetricReport:
        """Train one variant and score its quantized predictions on the
        training set."""
        trainer = Trainer(train_cfg, sinet=variant.sinet, backbone=self.seeded_backbone())
        result = trainer.fit(dataset)
        engine = InferenceEngine(self.config, result.params)
        rgb = quantized_images(dataset)
        names = dataset.names or tuple(f"sample-{i:04d}" for i in range(len(dataset)))
        pairs = [
            EvalPair(
                name=name,
                pred=imageio.to_uint8(engine.predict(rgb[i])).astype(np.float64) / 255.0,
                gt=dataset.masks[i, 0] > 0.5,
            )
            for i, name in enumerate(names)
        ]
        return self.evaluation.score_pairs(pairs, dataset=const.DATASET_NAME, model=variant.name)
