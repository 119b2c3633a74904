"""Shared score computation and canonical report serialization.

Everything the CLI, the simulator, and the bindings report goes through
compute_scores so the overlap table and IoU matrix are built once per
scene and every surface agrees bit-for-bit.
"""

from __future__ import annotations

import hashlib
import json

from . import __version__
from .classic import ap_from_match, mean_ap_from_matrix, pq_from_match
from .classic import aggregated_jaccard_index, default_thresholds, symmetric_best_dice
from .instances import InstanceSet
from .matching import greedy_match, unique_match
from .overlap import build_overlap_table, iou_matrix
from .sortedap import sorted_ap_from_matrix

__all__ = ["METRIC_NAMES", "compute_scores", "score_scene", "build_report", "report_to_json", "fmt12", "round12"]

METRIC_NAMES = ("ap", "map", "pq", "sbd", "aji", "sortedap")


def fmt12(x: float) -> str:
    """Canonical number formatting for reports and CSVs."""
    return "%.12g" % x


def round12(x: float) -> float:
    """Round to 12 significant digits, the precision carried by reports."""
    return float(fmt12(x))


def compute_scores(
    pred: InstanceSet,
    gt: InstanceSet,
    metrics=METRIC_NAMES,
    thresholds=None,
    matcher: str = "unique",
):
    """Evaluate the requested metrics plus the fuzz-match summary.

    Returns (scores, match_summary); scores maps "ap"/"map"/"sbd"/"aji"/
    "sorted_ap" to floats and "pq" to a PQBreakdown. `matcher` selects the
    matching used by ap, map and pq.
    """
    unknown = [m for m in metrics if m not in METRIC_NAMES]
    if unknown:
        raise ValueError(f"unknown metric name(s): {', '.join(unknown)}")
    if matcher not in ("unique", "greedy"):
        raise ValueError(f"unknown matcher {matcher!r}")
    if thresholds is None:
        thresholds = default_thresholds()
    match_fn = unique_match if matcher == "unique" else greedy_match

    table = build_overlap_table(pred, gt)
    matrix = iou_matrix(table)
    sap = sorted_ap_from_matrix(matrix)

    scores = {}
    if "ap" in metrics:
        scores["ap"] = ap_from_match(match_fn(matrix, 0.5))
    if "map" in metrics:
        scores["map"] = mean_ap_from_matrix(matrix, thresholds)
    if "pq" in metrics:
        scores["pq"] = pq_from_match(match_fn(matrix, 0.5))
    if "sbd" in metrics:
        scores["sbd"] = symmetric_best_dice(pred, gt)
    if "aji" in metrics:
        scores["aji"] = aggregated_jaccard_index(pred, gt)
    if "sortedap" in metrics:
        scores["sorted_ap"] = sap.score

    match_summary = {
        "tp0": sap.curve.tp0,
        "fn0": sap.curve.fn0,
        "n_pred": len(pred),
        "n_gt": len(gt),
    }
    return scores, match_summary


def score_scene(pred: InstanceSet, gt: InstanceSet) -> dict[str, float]:
    """Flat per-step score record used by degradation traces."""
    scores, _ = compute_scores(pred, gt)
    return {
        "ap": scores["ap"],
        "map": scores["map"],
        "pq": scores["pq"].pq,
        "sbd": scores["sbd"],
        "aji": scores["aji"],
        "sorted_ap": scores["sorted_ap"],
    }


def build_report(
    scores: dict,
    match_summary: dict,
    thresholds,
    matcher: str,
    gt_digest: str,
    pred_digest: str,
) -> dict:
    """Assemble the canonical evaluation report structure."""
    metrics: dict = {}
    for name in ("ap", "map"):
        if name in scores:
            metrics[name] = round12(scores[name])
    if "pq" in scores:
        pq = scores["pq"]
        metrics["pq"] = {"pq": round12(pq.pq), "rq": round12(pq.rq), "sq": round12(pq.sq)}
    for name in ("sbd", "aji", "sorted_ap"):
        if name in scores:
            metrics[name] = round12(scores[name])
    return {
        "tool": "segscore",
        "version": __version__,
        "inputs": {"gt": {"sha256": gt_digest}, "pred": {"sha256": pred_digest}},
        "matcher": matcher,
        "thresholds": [round12(t) for t in thresholds],
        "metrics": metrics,
        "match_summary": dict(match_summary),
    }


def report_to_json(report: dict) -> bytes:
    return (json.dumps(report, separators=(",", ":")) + "\n").encode("utf-8")


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
