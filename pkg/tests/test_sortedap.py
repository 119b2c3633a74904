import math

import numpy as np
import pytest

from segscore import Canvas, InstanceSet, ap_at, ap_curve, curve_to_rows, mean_ap, sorted_ap
from segscore.instances import mask_from_offsets
from segscore.sortedap import curve_from_match, integrate_curve, sorted_ap_from_matrix
from segscore.matching import unique_match

from conftest import interval_mask, random_instance_set


def reference_area(rows):
    """Independent trapezoid-at-drop-points integrator over exported rows."""
    (_, ap0), *drops = rows
    if not drops:
        return 0.0
    s = drops[0][0] * ap0
    prev_t, prev_ap = drops[0][0], ap0
    for t, ap in drops:
        s += 0.5 * (t - prev_t) * (ap + prev_ap)
        prev_t, prev_ap = t, ap
    return s


def identity_scene(k):
    canvas = Canvas(20 * k, 1)
    masks = tuple(interval_mask(canvas, 20 * i, 20 * i + 10) for i in range(k))
    s = InstanceSet(canvas, masks)
    return s, s


class TestApCurve:
    def test_identity_three(self):
        pred, gt = identity_scene(3)
        curve = ap_curve(pred, gt)
        assert curve.tp0 == 3 and curve.fn0 == 0 and curve.n_pred == 3
        assert curve.drop_ious == (1.0, 1.0, 1.0)
        assert curve.ap_initial == 1.0

    def test_two_matches(self, two_match_fixture):
        pred, gt = two_match_fixture
        curve = ap_curve(pred, gt)
        assert curve.ap_initial == 1.0
        assert curve.drop_ious == (0.6, 0.8)
        assert curve.ap_values == (1 / 3, 0.0)

    def test_no_overlap(self):
        canvas = Canvas(40, 1)
        pred = InstanceSet(canvas, (interval_mask(canvas, 0, 5),))
        gt = InstanceSet(canvas, (interval_mask(canvas, 20, 25),))
        curve = ap_curve(pred, gt)
        assert curve.tp0 == 0
        assert curve.drop_ious == ()

    def test_invariants_random(self):
        rng = np.random.default_rng(59)
        for _ in range(30):
            canvas = Canvas(14, 10)
            pred = random_instance_set(rng, canvas, int(rng.integers(1, 5)))
            gt = random_instance_set(rng, canvas, int(rng.integers(1, 5)))
            curve = ap_curve(pred, gt)
            assert list(curve.drop_ious) == sorted(curve.drop_ious)
            assert all(0 < t <= 1 for t in curve.drop_ious)
            if curve.tp0:
                assert list(curve.ap_values) == sorted(curve.ap_values, reverse=True)
                assert len(set(curve.ap_values)) == curve.tp0  # strictly decreasing
                assert curve.ap_values[-1] == 0.0
                assert curve.ap_initial >= curve.ap_values[0]


class TestSortedAp:
    def test_two_match_hand_trace(self, two_match_fixture):
        pred, gt = two_match_fixture
        assert sorted_ap(pred, gt).score == pytest.approx(0.6 + 0.5 * 0.2 * (1 / 3), abs=1e-15)

    def test_identity_exact_one(self):
        for k in (1, 2, 5):
            pred, gt = identity_scene(k)
            assert sorted_ap(pred, gt).score == 1.0

    def test_empty_pred_vs_nonempty_gt(self):
        canvas = Canvas(20, 1)
        pred = InstanceSet(canvas, ())
        gt = InstanceSet(canvas, (interval_mask(canvas, 0, 5),))
        assert sorted_ap(pred, gt).score == 0.0
        assert sorted_ap(gt, pred).score == 0.0

    def test_both_empty(self):
        canvas = Canvas(20, 1)
        empty = InstanceSet(canvas, ())
        assert sorted_ap(empty, empty).score == 1.0

    def test_single_match_closed_form(self):
        # one match with IoU u and no fp/fn gives exactly u
        rng = np.random.default_rng(61)
        for _ in range(100):
            u = float(rng.uniform(0.01, 1.0))
            result = sorted_ap_from_matrix(np.array([[u]]))
            assert abs(result.score - u) <= 1e-12

    def test_score_recomputable_from_curve(self, two_match_fixture):
        pred, gt = two_match_fixture
        result = sorted_ap(pred, gt)
        assert integrate_curve(result.curve) == result.score

    def test_reintegration_oracle_random(self):
        rng = np.random.default_rng(67)
        for _ in range(50):
            canvas = Canvas(14, 10)
            pred = random_instance_set(rng, canvas, int(rng.integers(0, 5)))
            gt = random_instance_set(rng, canvas, int(rng.integers(0, 5)))
            result = sorted_ap(pred, gt)
            if result.curve.tp0 == 0:
                continue
            assert abs(reference_area(curve_to_rows(result.curve)) - result.score) <= 1e-12

    def test_bounds(self):
        rng = np.random.default_rng(71)
        for _ in range(50):
            canvas = Canvas(14, 10)
            pred = random_instance_set(rng, canvas, int(rng.integers(0, 5)))
            gt = random_instance_set(rng, canvas, int(rng.integers(0, 5)))
            result = sorted_ap(pred, gt)
            assert 0.0 <= result.score <= 1.0
            if result.curve.tp0:
                assert result.score <= max(result.curve.drop_ious) + 1e-12

    def test_strict_sensitivity_same_structure(self):
        # same match structure, one matched IoU strictly lower -> strictly lower score
        rng = np.random.default_rng(73)
        for _ in range(50):
            n = int(rng.integers(1, 6))
            extra_fp = int(rng.integers(0, 3))
            extra_fn = int(rng.integers(0, 3))
            ious = rng.uniform(0.05, 1.0, size=n)
            matrix = np.zeros((n + extra_fp, n + extra_fn))
            matrix[:n, :n] = np.diag(ious)
            base = sorted_ap_from_matrix(matrix).score
            k = int(rng.integers(0, n))
            degraded = matrix.copy()
            degraded[k, k] = ious[k] * float(rng.uniform(0.1, 0.999))
            assert sorted_ap_from_matrix(degraded).score < base

    def test_detection_only_degeneration(self):
        # perfect masks, only fp/fn errors: sortedAP = AP at any t = mAP
        canvas = Canvas(200, 1)
        gt = InstanceSet(canvas, tuple(interval_mask(canvas, 20 * i, 20 * i + 10) for i in range(5)))
        pred = InstanceSet(canvas, gt.instances[:3] + (interval_mask(canvas, 110, 120),))
        s = sorted_ap(pred, gt).score
        assert s == ap_at(pred, gt, 0.5) == ap_at(pred, gt, 0.2) == mean_ap(pred, gt)
        assert s == 3 / (4 + 2)


class TestCurveToRows:
    def test_two_match_rows(self, two_match_fixture):
        pred, gt = two_match_fixture
        assert curve_to_rows(ap_curve(pred, gt)) == [(0.0, 1.0), (0.6, 1 / 3), (0.8, 0.0)]

    def test_identity_three_keeps_tied_drops(self):
        pred, gt = identity_scene(3)
        rows = curve_to_rows(ap_curve(pred, gt))
        assert rows == [(0.0, 1.0), (1.0, 2 / 4), (1.0, 1 / 5), (1.0, 0.0)]

    def test_empty_match(self):
        canvas = Canvas(20, 1)
        pred = InstanceSet(canvas, ())
        gt = InstanceSet(canvas, (interval_mask(canvas, 0, 5),))
        assert curve_to_rows(ap_curve(pred, gt)) == [(0.0, 0.0)]
