from __future__ import annotations

from codbench.lib.metrics import oracle
from codbench.lib.metrics.evaluate import EvalPair
from codbench.lib.metrics.evaluate import Evaluator
from codbench.lib.metrics.evaluate import evaluate_dataset
from codbench.lib.metrics.evaluate import evaluate_pairs
from codbench.lib.metrics.generalization import GeneralizationRow
from codbench.lib.metrics.generalization import GeneralizationTable
from codbench.lib.metrics.generalization import generalization_table
from codbench.lib.metrics.generalization import relative_drop
from codbench.lib.metrics.measures import MetricScores
from codbench.lib.metrics.measures import e_measure_curve
from codbench.lib.metrics.measures import e_measure_mean
from codbench.lib.metrics.measures import evaluate_pair
from codbench.lib.metrics.measures import mae
from codbench.lib.metrics.measures import nearest_foreground
from codbench.lib.metrics.measures import s_measure
from codbench.lib.metrics.measures import weighted_f_measure
from codbench.lib.metrics.report import METRICS
from codbench.lib.metrics.report import ImageScore
from codbench.lib.metrics.report import MetricReport
from codbench.lib.metrics.report import MetricSummary

__all__ = [
    "METRICS",
    "EvalPair",
    "Evaluator",
    "GeneralizationRow",
    "GeneralizationTable",
    "ImageScore",
    "MetricReport",
    "MetricScores",
    "MetricSummary",
    "e_measure_curve",
    "e_measure_mean",
    "evaluate_dataset",
    "evaluate_pair",
    "evaluate_pairs",
    "generalization_table",
    "mae",
    "nearest_foreground",
    "oracle",
    "relative_drop",
    "s_measure",
    "weighted_f_measure",
]
