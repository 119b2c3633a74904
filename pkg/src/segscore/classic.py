"""Classic instance segmentation metrics: precision/recall, point AP, mAP,
PQ/RQ/SQ, Best Dice, Symmetric Best Dice, and the Aggregated Jaccard Index.

Degenerate conventions (both sets empty -> 1.0; exactly one set empty ->
0.0; precision with zero predictions -> 1.0; recall with zero ground
truths -> 1.0) follow "perfect agreement on nothing".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .instances import InstanceSet
from .matching import MatchResult, greedy_match, unique_match
from .overlap import build_overlap_table, dice, iou_matrix

__all__ = [
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
]


@dataclass(frozen=True)
class PRPoint:
    precision: float
    recall: float
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class PQBreakdown:
    pq: float
    rq: float
    sq: float
    matched_iou_sum: float
    tp: int
    fp: int
    fn: int


def precision_recall(match: MatchResult) -> PRPoint:
    tp, fp, fn = match.tp, len(match.fp), len(match.fn)
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    return PRPoint(precision=precision, recall=recall, tp=tp, fp=fp, fn=fn)


def _point_ap(tp: int, fp: int, fn: int) -> float:
    denom = tp + fp + fn
    return tp / denom if denom else 1.0


def ap_from_match(match: MatchResult) -> float:
    """Point AP = TP/(TP+FP+FN) from an existing match result."""
    return _point_ap(match.tp, len(match.fp), len(match.fn))


def ap_at(pred: InstanceSet, gt: InstanceSet, t: float) -> float:
    """Point AP at IoU threshold t, using unique matching."""
    matrix = iou_matrix(build_overlap_table(pred, gt))
    return ap_from_match(unique_match(matrix, t))


def _mean(values: list[float]) -> float:
    # Mean of identical values is that value exactly; matters for the
    # detection-only regime where AP must equal mAP bit-for-bit.
    if min(values) == max(values):
        return values[0]
    return math.fsum(values) / len(values)


def threshold_range(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Ascending threshold grid, inclusive of both ends when step divides
    the range. Each value must lie in (0,1)."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    n = int(round((stop - start) / step))
    if n < 0 or abs(start + n * step - stop) > 1e-9:
        raise ValueError(f"step {step} does not divide the range [{start},{stop}]")
    values = tuple(start + k * step for k in range(n + 1))
    for t in values:
        if not (0.0 < t < 1.0):
            raise ValueError(f"threshold {t} outside (0,1)")
    return values


def default_thresholds() -> tuple[float, ...]:
    """The usual 0.50, 0.55, ..., 0.95 grid (10 values)."""
    return threshold_range(0.5, 0.95, 0.05)


def mean_ap_from_matrix(matrix: np.ndarray, thresholds) -> float:
    thresholds = tuple(thresholds)
    if not thresholds:
        raise ValueError("threshold list must be non-empty")
    return _mean([ap_from_match(unique_match(matrix, t)) for t in thresholds])


def mean_ap(pred: InstanceSet, gt: InstanceSet, thresholds=None) -> float:
    """Mean of point AP over ascending IoU thresholds (unique matching per
    threshold)."""
    if thresholds is None:
        thresholds = default_thresholds()
    matrix = iou_matrix(build_overlap_table(pred, gt))
    return mean_ap_from_matrix(matrix, thresholds)


def pq_from_match(match: MatchResult) -> PQBreakdown:
    tp, fp, fn = match.tp, len(match.fp), len(match.fn)
    matched_iou_sum = math.fsum(p[2] for p in match.pairs)
    if tp + fp + fn == 0:
        rq = sq = 1.0
    elif tp == 0:
        rq = sq = 0.0
    else:
        rq = 2.0 * tp / (2.0 * tp + fp + fn)
        sq = matched_iou_sum / tp
    return PQBreakdown(pq=rq * sq, rq=rq, sq=sq, matched_iou_sum=matched_iou_sum, tp=tp, fp=fp, fn=fn)


def panoptic_quality(
    pred: InstanceSet, gt: InstanceSet, t: float = 0.5, use_unique: bool = False
) -> PQBreakdown:
    """PQ = RQ * SQ at threshold t; greedy matching by default (faithful to
    PQ's definition), unique matching on request."""
    matrix = iou_matrix(build_overlap_table(pred, gt))
    match = unique_match(matrix, t) if use_unique else greedy_match(matrix, t)
    return pq_from_match(match)


def best_dice(src: InstanceSet, ref: InstanceSet) -> float:
    """Mean over src objects of the best Dice against any ref object; 0 for
    a src object with no intersecting ref object."""
    if len(src) == 0:
        raise ValueError("best dice is undefined for an empty source set")
    table = build_overlap_table(src, ref)
    best = [0.0] * len(src)
    for (i, j), _ in table.intersections.items():
        best[i] = max(best[i], dice(table, i, j))
    return _mean(best)


def symmetric_best_dice(pred: InstanceSet, gt: InstanceSet) -> float:
    """min(BD(pred, gt), BD(gt, pred)) with empty-set conventions."""
    if len(pred) == 0 and len(gt) == 0:
        return 1.0
    if len(pred) == 0 or len(gt) == 0:
        return 0.0
    return min(best_dice(pred, gt), best_dice(gt, pred))


def aggregated_jaccard_index(pred: InstanceSet, gt: InstanceSet) -> float:
    """Scene-level AJI: per-gt best-IoU intersections over accumulated
    unions plus the areas of never-selected predictions.

    One prediction may serve as best match for several ground truths (the
    literal accumulation rule); a gt with no intersecting prediction
    contributes its own area to the union.
    """
    if len(pred) == 0 and len(gt) == 0:
        return 1.0
    table = build_overlap_table(pred, gt)

    by_gt: dict[int, list[tuple[float, int, int]]] = {}
    for (i, j), inter in table.intersections.items():
        score = inter / (table.pred_areas[i] + table.gt_areas[j] - inter)
        by_gt.setdefault(j, []).append((score, i, inter))

    numerator = 0
    denominator = 0
    used: set[int] = set()
    for j in range(table.n_gt):
        candidates = by_gt.get(j)
        if not candidates:
            denominator += table.gt_areas[j]
            continue
        # best IoU; ties go to the lowest prediction index
        score, i, inter = max(candidates, key=lambda c: (c[0], -c[1]))
        numerator += inter
        denominator += table.pred_areas[i] + table.gt_areas[j] - inter
        used.add(i)
    for i in range(table.n_pred):
        if i not in used:
            denominator += table.pred_areas[i]
    return numerator / denominator
