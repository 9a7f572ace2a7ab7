from __future__ import annotations

import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import roc_auc_score

from fcmdnn.errors import DomainError, ShapeMismatchError, UndefinedMetricError
from fcmdnn.evaluation.metrics import (
    CSV_COLUMNS,
    ConfusionMatrix,
    confusion,
    curve_area,
    evaluate_binary,
    report,
    roc_auc,
)

counts = st.integers(min_value=0, max_value=500)


class ConfusionTest(unittest.TestCase):
    def test_perfect_and_inverted(self) -> None:
        self.assertEqual(confusion([1, 1, 0, 0], [1, 1, 0, 0]), ConfusionMatrix(tp=2, fp=0, tn=2, fn=0))
        self.assertEqual(confusion([0, 0, 1, 1], [1, 1, 0, 0]), ConfusionMatrix(tp=0, fp=2, tn=0, fn=2))

    def test_mixed_counts(self) -> None:
        self.assertEqual(confusion([1, 0, 1, 0], [1, 1, 0, 0]), ConfusionMatrix(tp=1, fp=1, tn=1, fn=1))

    def test_healthy_as_positive(self) -> None:
        cm = confusion([1, 0, 1, 0], [1, 1, 0, 0], positive_class=0)
        self.assertEqual(cm, ConfusionMatrix(tp=1, fp=1, tn=1, fn=1))
        cm = confusion([0, 0, 0], [0, 1, 1], positive_class=0)
        self.assertEqual((cm.tp, cm.fp), (1, 2))

    def test_counts_match_pairwise_tally(self) -> None:
        rng = np.random.default_rng(5)
        for _ in range(50):
            pred, act = rng.integers(0, 2, size=(2, 40)).tolist()
            pairs = list(zip(pred, act))
            expected = ConfusionMatrix(
                tp=pairs.count((1, 1)), fp=pairs.count((1, 0)), tn=pairs.count((0, 0)), fn=pairs.count((0, 1))
            )
            self.assertEqual(confusion(pred, act), expected)

    def test_empty_input_gives_empty_matrix(self) -> None:
        self.assertEqual(confusion([], []), ConfusionMatrix())

    def test_errors(self) -> None:
        with self.assertRaises(ShapeMismatchError):
            confusion([1, 0], [1])
        with self.assertRaises(DomainError):
            confusion([2, 0], [1, 0])

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=60), st.randoms())
    def test_permutation_invariance(self, pairs, rnd) -> None:
        shuffled = list(pairs)
        rnd.shuffle(shuffled)
        a = confusion([p for p, _ in pairs], [t for _, t in pairs])
        b = confusion([p for p, _ in shuffled], [t for _, t in shuffled])
        self.assertEqual(a, b)
        self.assertEqual(a.n, len(pairs))


class ReportTest(unittest.TestCase):
    def test_hand_values(self) -> None:
        r = report(ConfusionMatrix(tp=99, fp=0, tn=100, fn=1))
        self.assertAlmostEqual(r.acc, 0.995)
        self.assertEqual(r.ppv, 1.0)
        self.assertAlmostEqual(r.sen, 0.99)
        self.assertEqual(r.spc, 1.0)
        self.assertAlmostEqual(r.f1, 198 / 199, places=12)
        self.assertEqual(r.fpr, 0.0)
        self.assertAlmostEqual(r.fnr, 0.01)
        self.assertAlmostEqual(r.fnr_percent, 1.0)

    def test_zero_denominators_are_undefined(self) -> None:
        r = report(ConfusionMatrix(tn=10))
        self.assertEqual((r.acc, r.spc), (1.0, 1.0))
        self.assertIsNone(r.ppv)
        self.assertIsNone(r.sen)
        self.assertIsNone(r.f1)
        self.assertIsNone(r.fnr)
        for key in ("ppv", "sen", "f1", "fnr"):
            self.assertIn(key, r.undefined)
        self.assertNotIn("spc", r.undefined)

    def test_symmetric_matrix(self) -> None:
        r = report(ConfusionMatrix(tp=25, fp=25, tn=25, fn=25))
        for value in (r.acc, r.ppv, r.sen, r.spc, r.f1):
            self.assertEqual(value, 0.5)

    def test_empty_matrix(self) -> None:
        with self.assertRaises(UndefinedMetricError):
            report(ConfusionMatrix())

    def test_csv_row_order_and_percent(self) -> None:
        r = report(ConfusionMatrix(tp=3, fp=1, tn=4, fn=2)).with_auc(0.8)
        row = r.csv_row()
        self.assertEqual(tuple(row), CSV_COLUMNS)
        self.assertAlmostEqual(row["FPR"], 20.0)
        self.assertAlmostEqual(row["FNR"], 40.0)
        self.assertEqual(row["AUC"], 0.8)
        self.assertNotIn("auc", r.undefined)

    def test_direct_substitution_on_random_matrices(self) -> None:
        rng = np.random.default_rng(10)
        for tp, fp, tn, fn in rng.integers(1, 1000, size=(1000, 4)).tolist():
            r = report(ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn))
            self.assertEqual(r.acc, (tp + tn) / (tp + fp + tn + fn))
            self.assertEqual(r.ppv, tp / (tp + fp))
            self.assertEqual(r.sen, tp / (tp + fn))
            self.assertEqual(r.spc, tn / (tn + fp))
            self.assertEqual(r.f1, 2 * tp / (2 * tp + fp + fn))
            self.assertEqual(r.fpr, 1.0 - r.spc)
            self.assertEqual(r.fnr, 1.0 - r.sen)

    @settings(max_examples=200, deadline=None)
    @given(tp=counts, fp=counts, tn=counts, fn=counts)
    def test_identities(self, tp: int, fp: int, tn: int, fn: int) -> None:
        cm = ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)
        if cm.n == 0:
            return
        r = report(cm)
        self.assertEqual(r.acc, (tp + tn) / cm.n)
        if r.spc is not None:
            self.assertEqual(r.fpr + r.spc, 1.0)
        if r.sen is not None:
            self.assertEqual(r.fnr + r.sen, 1.0)
        for value in (r.acc, r.ppv, r.sen, r.spc, r.f1, r.fpr, r.fnr):
            if value is not None:
                self.assertTrue(0.0 <= value <= 1.0)


class RocAucTest(unittest.TestCase):
    def test_hand_values(self) -> None:
        self.assertEqual(roc_auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])[0], 1.0)
        self.assertEqual(roc_auc([0.4] * 6, [1, 0, 1, 0, 1, 0])[0], 0.5)
        self.assertEqual(roc_auc([0.8, 0.3, 0.5, 0.1], [1, 1, 0, 0])[0], 0.75)

    def test_curve_endpoints(self) -> None:
        _, curve = roc_auc([0.8, 0.3, 0.5, 0.1], [1, 1, 0, 0])
        self.assertEqual(curve[0], (0.0, 0.0))
        self.assertEqual(curve[-1], (1.0, 1.0))
        xs = [p[0] for p in curve]
        ys = [p[1] for p in curve]
        self.assertEqual(xs, sorted(xs))
        self.assertEqual(ys, sorted(ys))

    def test_curve_keeps_every_threshold(self) -> None:
        _, curve = roc_auc([0.8, 0.3, 0.5, 0.1], [1, 1, 0, 0])
        self.assertEqual(curve, [(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)])
        _, tied = roc_auc([0.4] * 6, [1, 0, 1, 0, 1, 0])
        self.assertEqual(tied, [(0.0, 0.0), (1.0, 1.0)])

    def test_single_class(self) -> None:
        with self.assertRaises(UndefinedMetricError):
            roc_auc([0.1, 0.9], [1, 1])

    def test_rank_auc_equals_trapezoid_and_sklearn(self) -> None:
        rng = np.random.default_rng(17)
        for _ in range(200):
            n = int(rng.integers(2, 80))
            actual = rng.integers(0, 2, size=n)
            actual[0], actual[1] = 0, 1
            # redondeo para forzar empates
            scores = np.round(rng.uniform(size=n), int(rng.integers(1, 4)))
            auc, curve = roc_auc(scores, actual)
            self.assertAlmostEqual(auc, curve_area(curve), delta=1e-12)
            self.assertAlmostEqual(auc, roc_auc_score(actual, scores), delta=1e-12)

    def test_reversing_scores_complements_auc(self) -> None:
        rng = np.random.default_rng(3)
        for _ in range(50):
            actual = np.array([0, 1] + rng.integers(0, 2, size=30).tolist())
            scores = rng.uniform(size=actual.size)
            auc, _ = roc_auc(scores, actual)
            rev, _ = roc_auc(-scores, actual)
            self.assertAlmostEqual(auc + rev, 1.0, delta=1e-12)


class EvaluateBinaryTest(unittest.TestCase):
    def test_attaches_auc(self) -> None:
        r = evaluate_binary([1, 0, 1, 0], [1, 1, 0, 0], scores=[0.8, 0.3, 0.5, 0.1])
        self.assertEqual(r.auc, 0.75)
        self.assertEqual(r.cm, ConfusionMatrix(tp=1, fp=1, tn=1, fn=1))

    def test_single_class_fold_keeps_auc_undefined(self) -> None:
        r = evaluate_binary([1, 1], [1, 1], scores=[0.9, 0.7])
        self.assertIsNone(r.auc)
        self.assertIn("auc", r.undefined)
        self.assertEqual(r.sen, 1.0)
        self.assertIsNone(r.spc)


if __name__ == "__main__":
    unittest.main()
