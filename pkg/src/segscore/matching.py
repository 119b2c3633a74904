"""One-to-one matching between predictions and ground truths.

Three matchers over an N x M IoU matrix and a strict threshold t:

- greedy_match: descending-IoU greedy, the matching implicitly used by
  mAP and PQ at thresholds >= 0.5.
- unique_match: maximum-total-IoU one-to-one assignment (Hungarian via
  scipy) over entries with IoU > t.
- brute_force_match: exhaustive oracle for small instances.

All three share the same deterministic tie-break: among equally optimal
assignments, the lexicographically smallest pair list ordered by
(pred index, gt index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = ["MatchResult", "greedy_match", "unique_match", "brute_force_match"]

# Slack for comparing assignment totals during tie-break canonicalization;
# absorbs float summation-order noise without affecting distinct optima.
_TOTAL_SLACK = 1e-9


@dataclass(frozen=True)
class MatchResult:
    """Matched (pred, gt, iou) triples plus unmatched index lists.

    Every pair's IoU is strictly greater than `threshold`; each pred and
    each gt index appears at most once across pairs.
    """

    pairs: tuple[tuple[int, int, float], ...]
    fp: tuple[int, ...]  # unmatched prediction indices
    fn: tuple[int, ...]  # unmatched ground truth indices
    threshold: float

    @property
    def tp(self) -> int:
        return len(self.pairs)

    @property
    def total_iou(self) -> float:
        return sum(p[2] for p in self.pairs)


def _as_matrix(iou) -> np.ndarray:
    matrix = np.asarray(iou, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError(f"IoU matrix must be 2-D, got shape {matrix.shape}")
    return matrix


def _check_threshold(t: float) -> None:
    if not (0.0 < t < 1.0):
        raise ValueError(f"threshold must lie in (0,1), got {t}")


def _result(matrix: np.ndarray, pairs: list[tuple[int, int]], t: float) -> MatchResult:
    pairs = sorted(pairs)
    used_p = {i for i, _ in pairs}
    used_g = {j for _, j in pairs}
    return MatchResult(
        pairs=tuple((i, j, float(matrix[i, j])) for i, j in pairs),
        fp=tuple(i for i in range(matrix.shape[0]) if i not in used_p),
        fn=tuple(j for j in range(matrix.shape[1]) if j not in used_g),
        threshold=t,
    )


def greedy_match(iou, t: float) -> MatchResult:
    """Greedy descending-IoU matching over entries with IoU > t."""
    matrix = _as_matrix(iou)
    _check_threshold(t)
    n, m = matrix.shape
    candidates = sorted(
        ((i, j) for i in range(n) for j in range(m) if matrix[i, j] > t),
        key=lambda ij: (-matrix[ij], ij[0], ij[1]),
    )
    used_p: set[int] = set()
    used_g: set[int] = set()
    pairs = []
    for i, j in candidates:
        if i not in used_p and j not in used_g:
            pairs.append((i, j))
            used_p.add(i)
            used_g.add(j)
    return _result(matrix, pairs, t)


def _lsa_total(profit: np.ndarray) -> float:
    if profit.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(profit, maximize=True)
    return float(profit[rows, cols].sum())


def _lex_min_optimal(profit: np.ndarray) -> list[tuple[int, int]]:
    """Lexicographically smallest maximum-total assignment over positive entries."""
    n, m = profit.shape
    target = _lsa_total(profit)
    avail = list(range(m))
    pairs: list[tuple[int, int]] = []
    prefix = 0.0
    for i in range(n):
        chosen = None
        for j in avail:
            if profit[i, j] <= 0.0:
                continue
            rest_cols = [c for c in avail if c != j]
            rest = profit[np.ix_(range(i + 1, n), rest_cols)]
            if prefix + profit[i, j] + _lsa_total(rest) >= target - _TOTAL_SLACK:
                chosen = j
                break
        if chosen is not None:
            pairs.append((i, chosen))
            prefix += profit[i, chosen]
            avail.remove(chosen)
        # else: the optimum leaves prediction i unmatched
    return pairs


def unique_match(iou, t: float) -> MatchResult:
    """Maximum-weight one-to-one assignment over entries with IoU > t.

    Maximizes the accumulated IoU of matched pairs; assignments with zero
    profit are discarded as non-matches. Deterministic under ties.
    """
    matrix = _as_matrix(iou)
    _check_threshold(t)
    profit = np.where(matrix > t, matrix, 0.0)
    if not profit.any():
        return _result(matrix, [], t)

    positive = profit > 0.0
    # Forced-assignment shortcut: at most one candidate per row and column.
    if positive.sum(axis=0).max(initial=0) <= 1 and positive.sum(axis=1).max(initial=0) <= 1:
        pairs = [(int(i), int(j)) for i, j in zip(*np.nonzero(positive))]
    else:
        pairs = _lex_min_optimal(profit)
    return _result(matrix, pairs, t)


def brute_force_match(iou, t: float) -> MatchResult:
    """Exhaustive maximum-total-IoU matching oracle; requires N, M <= 10."""
    matrix = _as_matrix(iou)
    _check_threshold(t)
    n, m = matrix.shape
    if n > 10 or m > 10:
        raise ValueError(f"brute force limited to 10x10 instances, got {n}x{m}")

    best_total = -1.0
    best_pairs: list[tuple[int, int]] = []

    def recurse(i: int, used: set[int], pairs: list[tuple[int, int]], total: float) -> None:
        nonlocal best_total, best_pairs
        if i == n:
            if total > best_total or (total == best_total and pairs < best_pairs):
                best_total = total
                best_pairs = list(pairs)
            return
        for j in range(m):
            if j not in used and matrix[i, j] > t:
                used.add(j)
                pairs.append((i, j))
                recurse(i + 1, used, pairs, total + matrix[i, j])
                pairs.pop()
                used.remove(j)
        recurse(i + 1, used, pairs, total)  # prediction i unmatched

    recurse(0, set(), [], 0.0)
    return _result(matrix, best_pairs, t)
