import numpy as np
import pytest

from segscore import Canvas, brute_force_match, build_overlap_table, greedy_match, iou_matrix, unique_match

from conftest import random_instance_set


def pair_set(match):
    return {(i, j) for i, j, _ in match.pairs}


class TestGreedyMatch:
    def test_single_perfect_pair(self):
        m = greedy_match([[1.0]], 0.5)
        assert m.pairs == ((0, 0, 1.0),)
        assert m.fp == () and m.fn == ()

    def test_greedy_blocks_better_pairing(self):
        m = greedy_match([[0.95, 0.3], [0.3, 0.0]], 0.25)
        assert m.pairs == ((0, 0, 0.95),)
        assert m.fp == (1,)
        assert m.fn == (1,)

    def test_below_threshold(self):
        m = greedy_match([[0.4]], 0.5)
        assert m.pairs == ()
        assert m.fp == (0,)
        assert m.fn == (0,)

    def test_tie_break_low_indices(self):
        m = greedy_match([[0.7, 0.7], [0.7, 0.7]], 0.5)
        assert pair_set(m) == {(0, 0), (1, 1)}


class TestUniqueMatch:
    def test_beats_greedy_on_cross_preference(self):
        iou = [[0.6, 0.5], [0.55, 0.1]]
        m = unique_match(iou, 0.3)
        assert pair_set(m) == {(0, 1), (1, 0)}
        assert m.total_iou == pytest.approx(1.05, abs=1e-12)
        g = greedy_match(iou, 0.3)
        assert pair_set(g) == {(0, 0)}

    def test_identity_diagonal(self):
        m = unique_match(np.eye(3), 0.5)
        assert pair_set(m) == {(0, 0), (1, 1), (2, 2)}
        assert m.fp == () and m.fn == ()

    def test_all_below_threshold(self):
        m = unique_match([[0.2, 0.1], [0.1, 0.2]], 0.5)
        assert m.pairs == ()
        assert m.fp == (0, 1)
        assert m.fn == (0, 1)

    def test_retains_perfect_iou_matches(self):
        # padding/zero-profit removal must not drop IoU = 1 pairs
        m = unique_match([[1.0, 0.0], [0.0, 1.0]], 0.5)
        assert pair_set(m) == {(0, 0), (1, 1)}

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            unique_match([[0.5]], 0.0)
        with pytest.raises(ValueError):
            unique_match([[0.5]], 1.0)

    def test_rectangular_shapes(self):
        m = unique_match([[0.9, 0.8, 0.7]], 0.5)
        assert pair_set(m) == {(0, 0)}
        assert m.fn == (1, 2)
        m = unique_match(np.zeros((0, 3)), 0.5)
        assert m.pairs == () and m.fn == (0, 1, 2)


class TestBruteForceMatch:
    def test_matches_unique_on_cross_preference(self):
        m = brute_force_match([[0.6, 0.5], [0.55, 0.1]], 0.3)
        assert m == unique_match([[0.6, 0.5], [0.55, 0.1]], 0.3)

    def test_single_entry(self):
        m = brute_force_match([[0.9]], 0.5)
        assert m.pairs == ((0, 0, 0.9),)

    def test_empty_pred_side(self):
        m = brute_force_match(np.zeros((0, 3)), 0.5)
        assert m.pairs == ()
        assert m.fn == (0, 1, 2)

    def test_size_limit(self):
        with pytest.raises(ValueError, match="10x10"):
            brute_force_match(np.zeros((11, 2)), 0.5)


class TestProperties:
    def test_optimality_against_brute_force(self):
        rng = np.random.default_rng(23)
        for _ in range(150):
            n, m = rng.integers(0, 7, size=2)
            matrix = np.round(rng.random((n, m)), 3)
            t = float(rng.uniform(0.05, 0.9))
            u = unique_match(matrix, t)
            b = brute_force_match(matrix, t)
            assert u.total_iou == b.total_iou
            assert u == b  # shared tie-break makes results identical

    def test_dominance_over_greedy(self):
        rng = np.random.default_rng(29)
        for _ in range(200):
            n, m = rng.integers(0, 8, size=2)
            matrix = rng.random((n, m))
            t = float(rng.uniform(0.05, 0.9))
            assert unique_match(matrix, t).total_iou >= greedy_match(matrix, t).total_iou - 1e-12

    def test_counting_identities(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            n, m = rng.integers(0, 9, size=2)
            matrix = rng.random((n, m))
            for match in (unique_match(matrix, 0.4), greedy_match(matrix, 0.4)):
                assert len(match.pairs) + len(match.fp) == n
                assert len(match.pairs) + len(match.fn) == m
                preds = [i for i, _, _ in match.pairs]
                gts = [j for _, j, _ in match.pairs]
                assert len(set(preds)) == len(preds)
                assert len(set(gts)) == len(gts)
                assert all(v > match.threshold for _, _, v in match.pairs)

    def test_threshold_monotonicity(self):
        rng = np.random.default_rng(37)
        for _ in range(50):
            matrix = rng.random((6, 6))
            sizes = [len(unique_match(matrix, t).pairs) for t in (0.1, 0.3, 0.5, 0.7, 0.9)]
            assert sizes == sorted(sizes, reverse=True)

    def test_greedy_equals_unique_for_nonoverlap_at_half(self):
        rng = np.random.default_rng(41)
        for _ in range(40):
            canvas = Canvas(16, 12)
            gt = random_instance_set(rng, canvas, 4, max_area=16, allow_overlap=False)
            pred = random_instance_set(rng, canvas, 4, max_area=16, allow_overlap=False)
            matrix = iou_matrix(build_overlap_table(pred, gt))
            assert pair_set(greedy_match(matrix, 0.5)) == pair_set(unique_match(matrix, 0.5))
