from __future__ import annotations

DEFAULT_ROW = "default"
WITHOUT_NCD = "w/o NCD"
WITHOUT_TEM = "w/o TEM"
TABLE_TITLE = "Ablation over architecture variants"
DATASET_NAME = "toy"
OUTPUT_STEM = "ablation"
