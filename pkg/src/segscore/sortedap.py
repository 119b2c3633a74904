"""The sortedAP metric: the exact AP-vs-IoU-threshold drop curve and its
trapezoidal area.

One unique-matching run with a tiny fuzz threshold yields the maximal
match; raising the threshold then removes matches one by one in ascending
IoU order, so the drop points of the AP curve are exactly the sorted
matched IoUs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instances import InstanceSet
from .matching import MatchResult, unique_match
from .overlap import build_overlap_table, iou_matrix

__all__ = ["APCurve", "SortedAPResult", "ap_curve", "sorted_ap", "curve_to_rows", "FUZZ_THRESHOLD"]

FUZZ_THRESHOLD = 1e-6


@dataclass(frozen=True)
class APCurve:
    tp0: int
    fn0: int
    n_pred: int
    drop_ious: tuple[float, ...]  # ascending, one per initial match
    ap_values: tuple[float, ...]  # AP after k drops, k = 1..tp0; ends at 0
    ap_initial: float  # tp0 / (n_pred + fn0)


@dataclass(frozen=True)
class SortedAPResult:
    score: float
    curve: APCurve
    match: MatchResult  # fuzz-threshold matching


def curve_from_match(match: MatchResult, n_pred: int) -> APCurve:
    tp0 = match.tp
    fn0 = len(match.fn)
    denom0 = n_pred + fn0
    return APCurve(
        tp0=tp0,
        fn0=fn0,
        n_pred=n_pred,
        drop_ious=tuple(sorted(p[2] for p in match.pairs)),
        ap_values=tuple((tp0 - k) / (denom0 + k) for k in range(1, tp0 + 1)),
        ap_initial=tp0 / denom0 if denom0 else 0.0,
    )


def ap_curve_from_matrix(matrix: np.ndarray, fuzz: float = FUZZ_THRESHOLD) -> tuple[APCurve, MatchResult]:
    match = unique_match(matrix, fuzz)
    return curve_from_match(match, matrix.shape[0]), match


def ap_curve(pred: InstanceSet, gt: InstanceSet, fuzz: float = FUZZ_THRESHOLD) -> APCurve:
    """AP drop curve from one fuzz-threshold unique-matching run."""
    matrix = iou_matrix(build_overlap_table(pred, gt))
    return ap_curve_from_matrix(matrix, fuzz)[0]


def integrate_curve(curve: APCurve) -> float:
    """Trapezoidal area under the drop curve: an initial rectangle up to the
    lowest drop IoU, then trapezoids between successive drops."""
    if curve.tp0 == 0:
        return 0.0
    t_prev = curve.drop_ious[0]
    ap_prev = curve.ap_initial
    s = t_prev * ap_prev
    for t_k, ap_k in zip(curve.drop_ious, curve.ap_values):
        s += 0.5 * (t_k - t_prev) * (ap_k + ap_prev)
        t_prev, ap_prev = t_k, ap_k
    return s


def sorted_ap_from_matrix(matrix: np.ndarray, fuzz: float = FUZZ_THRESHOLD) -> SortedAPResult:
    curve, match = ap_curve_from_matrix(matrix, fuzz)
    if curve.tp0 == 0:
        # undefined by the algorithm: 1 only for two empty sets
        both_empty = curve.n_pred == 0 and curve.fn0 == 0
        score = 1.0 if both_empty else 0.0
    else:
        score = integrate_curve(curve)
    return SortedAPResult(score=score, curve=curve, match=match)


def sorted_ap(pred: InstanceSet, gt: InstanceSet, fuzz: float = FUZZ_THRESHOLD) -> SortedAPResult:
    """sortedAP score: area under the exact AP curve; 0 <= score <= 1."""
    matrix = iou_matrix(build_overlap_table(pred, gt))
    return sorted_ap_from_matrix(matrix, fuzz)


def curve_to_rows(curve: APCurve) -> list[tuple[float, float]]:
    """Step-function export: (0, initial AP) then one row per drop, ties
    kept as separate zero-width drops."""
    rows = [(0.0, curve.ap_initial)]
    rows.extend(zip(curve.drop_ious, curve.ap_values))
    return rows
