"""Instance segmentation evaluation: classic metrics, unique matching,
sortedAP, and a degradation simulator."""

__version__ = "0.1.0"

from .instances import (
    Canvas,
    InstanceSet,
    Mask,
    ParseError,
    mask_from_pixels,
    parse_label_map_pgm,
    parse_rle_json,
    write_rle_json,
)
from .overlap import CanvasMismatchError, OverlapTable, build_overlap_table, dice, iou, iou_matrix
from .matching import MatchResult, brute_force_match, greedy_match, unique_match
from .classic import (
    PQBreakdown,
    PRPoint,
    aggregated_jaccard_index,
    ap_at,
    best_dice,
    default_thresholds,
    mean_ap,
    panoptic_quality,
    precision_recall,
    symmetric_best_dice,
    threshold_range,
)
from .sortedap import APCurve, SortedAPResult, ap_curve, curve_to_rows, sorted_ap
from .simulate import (
    DegradationTrace,
    PlacementError,
    Scene,
    erode_mask,
    gen_scene,
    run_incremental_falses,
    run_object_erosion,
    run_pixel_removal,
    trace_to_csv,
)

__all__ = [
    "Canvas",
    "Mask",
    "InstanceSet",
    "ParseError",
    "parse_rle_json",
    "write_rle_json",
    "parse_label_map_pgm",
    "mask_from_pixels",
    "OverlapTable",
    "CanvasMismatchError",
    "build_overlap_table",
    "iou",
    "dice",
    "iou_matrix",
    "MatchResult",
    "greedy_match",
    "unique_match",
    "brute_force_match",
    "PRPoint",
    "PQBreakdown",
    "precision_recall",
    "ap_at",
    "mean_ap",
    "panoptic_quality",
    "best_dice",
    "symmetric_best_dice",
    "aggregated_jaccard_index",
    "default_thresholds",
    "threshold_range",
    "APCurve",
    "SortedAPResult",
    "ap_curve",
    "sorted_ap",
    "curve_to_rows",
    "Scene",
    "DegradationTrace",
    "PlacementError",
    "gen_scene",
    "erode_mask",
    "run_incremental_falses",
    "run_object_erosion",
    "run_pixel_removal",
    "trace_to_csv",
]
