from __future__ import annotations

from codbench.lib.dataset.attributes import ANNOTATED_ONLY
from codbench.lib.dataset.attributes import COMPUTABLE
from codbench.lib.dataset.attributes import AttributeSet
from codbench.lib.dataset.attributes import co_occurrence
from codbench.lib.dataset.attributes import compute_attributes
from codbench.lib.dataset.attributes import count_objects
from codbench.lib.dataset.contrast import chi_square
from codbench.lib.dataset.contrast import color_histogram
from codbench.lib.dataset.contrast import global_contrast
from codbench.lib.dataset.contrast import local_contrast
from codbench.lib.dataset.manifest import ATTRIBUTES
from codbench.lib.dataset.manifest import DatasetManifest
from codbench.lib.dataset.manifest import ManifestLoader
from codbench.lib.dataset.manifest import ManifestRecord
from codbench.lib.dataset.manifest import load_manifest
from codbench.lib.dataset.manifest import parse_class_labels
from codbench.lib.dataset.stats import DatasetAnalysis
from codbench.lib.dataset.stats import DatasetAnalyzer
from codbench.lib.dataset.stats import DatasetStats
from codbench.lib.dataset.stats import Distribution
from codbench.lib.dataset.stats import average_mask
from codbench.lib.dataset.stats import center_bias
from codbench.lib.dataset.stats import centroid_distance
from codbench.lib.dataset.stats import contrast_stats
from codbench.lib.dataset.stats import object_ratio
from codbench.lib.dataset.stats import object_size_stats

__all__ = [
    "ANNOTATED_ONLY",
    "ATTRIBUTES",
    "COMPUTABLE",
    "AttributeSet",
    "DatasetAnalysis",
    "DatasetAnalyzer",
    "DatasetManifest",
    "DatasetStats",
    "Distribution",
    "ManifestLoader",
    "ManifestRecord",
    "average_mask",
    "center_bias",
    "centroid_distance",
    "chi_square",
    "co_occurrence",
    "color_histogram",
    "compute_attributes",
    "contrast_stats",
    "count_objects",
    "global_contrast",
    "load_manifest",
    "local_contrast",
    "object_ratio",
    "object_size_stats",
    "parse_class_labels",
]
