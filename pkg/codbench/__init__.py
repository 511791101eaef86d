from __future__ import annotations

__title__ = "Codbench"
__prog__ = "codbench"
__version__ = "0.3.0"
__description__ = """
Codbench is a desk-scale concealed object detection workbench.
It runs a search-and-identification segmentation network on a small numpy autodiff kernel,
and ships the benchmark machinery around it: S-measure, mean E-measure, weighted F-measure and MAE,
dataset attribute and statistics analysis, ablation grids and cross-dataset generalization tables.
"""
