from __future__ import annotations

from codbench.lib.nn.backbone import FeaturePyramid
from codbench.lib.nn.backbone import backbone_layout
from codbench.lib.nn.backbone import extract_pyramid
from codbench.lib.nn.backbone import init_backbone_params
from codbench.lib.nn.exceptions import WeightFileError
from codbench.lib.nn.exceptions import WeightVersionError
from codbench.lib.nn.params import Layers
from codbench.lib.nn.params import SinetParams
from codbench.lib.nn.sinet import SideOutputs
from codbench.lib.nn.sinet import gra_block
from codbench.lib.nn.sinet import group_guidance
from codbench.lib.nn.sinet import init_sinet_params
from codbench.lib.nn.sinet import ncd
from codbench.lib.nn.sinet import reverse_guidance
from codbench.lib.nn.sinet import sinet_forward
from codbench.lib.nn.sinet import sinet_layout
from codbench.lib.nn.sinet import tem
from codbench.lib.nn.weights import WeightFile
from codbench.lib.nn.weights import load_weights
from codbench.lib.nn.weights import save_weights

__all__ = [
    "FeaturePyramid",
    "Layers",
    "SideOutputs",
    "SinetParams",
    "WeightFile",
    "WeightFileError",
    "WeightVersionError",
    "backbone_layout",
    "extract_pyramid",
    "gra_block",
    "group_guidance",
    "init_backbone_params",
    "init_sinet_params",
    "load_weights",
    "ncd",
    "reverse_guidance",
    "save_weights",
    "sinet_forward",
    "sinet_layout",
    "tem",
]
