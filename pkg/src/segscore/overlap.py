"""Pairwise intersection, IoU and Dice statistics between two instance sets.

Exact integer pixel counts are stored; ratios are derived in double
precision at query time. Intersection storage is sparse: typical scenes
have O(N) intersecting pairs, not N*M.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from .instances import InstanceSet

__all__ = ["OverlapTable", "CanvasMismatchError", "build_overlap_table", "iou", "dice", "iou_matrix"]


class CanvasMismatchError(ValueError):
    """Prediction and ground truth sets live on different canvases."""


@dataclass(frozen=True)
class OverlapTable:
    n_pred: int
    n_gt: int
    intersections: MappingProxyType  # (pred idx, gt idx) -> pixel count >= 1
    pred_areas: tuple[int, ...]
    gt_areas: tuple[int, ...]


def build_overlap_table(pred: InstanceSet, gt: InstanceSet) -> OverlapTable:
    """Exact intersection counts for every intersecting (pred, gt) pair.

    Co-occurrence scan over sorted runs: cost is proportional to total run
    count plus the number of intersecting run pairs, never N*M*pixels.
    """
    if pred.canvas != gt.canvas:
        raise CanvasMismatchError(
            f"canvas mismatch: pred {pred.canvas.width}x{pred.canvas.height} "
            f"vs gt {gt.canvas.width}x{gt.canvas.height}"
        )

    gt_runs = []  # (start, end, gt index); runs of different gts may overlap
    max_len = 0
    for j, mask in enumerate(gt.instances):
        for start, length in mask.runs:
            gt_runs.append((start, start + length, j))
            max_len = max(max_len, length)
    gt_runs.sort()
    gt_starts = [r[0] for r in gt_runs]

    counts: dict[tuple[int, int], int] = {}
    for i, mask in enumerate(pred.instances):
        for start, length in mask.runs:
            end = start + length
            lo = bisect.bisect_left(gt_starts, start - max_len + 1)
            hi = bisect.bisect_left(gt_starts, end)
            for k in range(lo, hi):
                g_start, g_end, j = gt_runs[k]
                ov = min(end, g_end) - max(start, g_start)
                if ov > 0:
                    key = (i, j)
                    counts[key] = counts.get(key, 0) + ov

    return OverlapTable(
        n_pred=len(pred),
        n_gt=len(gt),
        intersections=MappingProxyType(counts),
        pred_areas=tuple(m.area for m in pred.instances),
        gt_areas=tuple(m.area for m in gt.instances),
    )


def _check_indices(table: OverlapTable, i: int, j: int) -> None:
    if not (0 <= i < table.n_pred):
        raise IndexError(f"prediction index {i} out of range [0,{table.n_pred})")
    if not (0 <= j < table.n_gt):
        raise IndexError(f"ground truth index {j} out of range [0,{table.n_gt})")


def iou(table: OverlapTable, i: int, j: int) -> float:
    """Intersection over union of prediction i and ground truth j."""
    _check_indices(table, i, j)
    inter = table.intersections.get((i, j), 0)
    if inter == 0:
        return 0.0
    return inter / (table.pred_areas[i] + table.gt_areas[j] - inter)


def dice(table: OverlapTable, i: int, j: int) -> float:
    """Dice coefficient of prediction i and ground truth j."""
    _check_indices(table, i, j)
    inter = table.intersections.get((i, j), 0)
    if inter == 0:
        return 0.0
    return 2.0 * inter / (table.pred_areas[i] + table.gt_areas[j])


def iou_matrix(table: OverlapTable) -> np.ndarray:
    """Dense N x M IoU matrix, the input shape expected by matching."""
    matrix = np.zeros((table.n_pred, table.n_gt), dtype=np.float64)
    for (i, j), inter in table.intersections.items():
        matrix[i, j] = inter / (table.pred_areas[i] + table.gt_areas[j] - inter)
    return matrix
