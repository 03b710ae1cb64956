"""Hierarchical superpixel engine.

Builds a perfectly nested segmentation hierarchy from a fine superpixel
partition by object-constrained two-phase region merging, extracts
partitions at any scale, modulates the hierarchy with attention or user
clicks, and evaluates results with standard superpixel metrics.
"""

from .features import (
    assemble_features,
    clicks_to_attention,
    position_planes,
    resample_attention,
    rgb_to_lab,
)
from .hierarchy import (
    HierarchyParams,
    MergeRecord,
    MergeSequence,
    build_hierarchy,
    extract_partition,
    merge_regions,
)
from .imgio import Click, load_image, load_label_map, save_label_map
from .metrics import MetricsReport, evaluate
from .partition import grid_partition
from .rag import RegionGraph, build_rag

__version__ = "0.1.0"

__all__ = [
    "Click",
    "HierarchyParams",
    "MergeRecord",
    "MergeSequence",
    "MetricsReport",
    "RegionGraph",
    "assemble_features",
    "build_hierarchy",
    "build_rag",
    "clicks_to_attention",
    "evaluate",
    "extract_partition",
    "grid_partition",
    "load_image",
    "load_label_map",
    "merge_regions",
    "position_planes",
    "resample_attention",
    "rgb_to_lab",
    "save_label_map",
    "__version__",
]
