from __future__ import annotations

import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from fcmdnn.errors import FoldPlanError, InvalidFoldCountError, ShapeMismatchError
from fcmdnn.partition.folds import FoldPlan, make_fold_plan


class FoldPlanTest(unittest.TestCase):
    def test_even_split(self) -> None:
        plan = make_fold_plan(10, 5, seed=0)
        self.assertEqual(plan.test_sizes(), [2] * 5)
        union = sorted(i for f in plan.folds for i in f.test_indices)
        self.assertEqual(union, list(range(10)))

    def test_remainder_goes_to_first_folds(self) -> None:
        self.assertEqual(make_fold_plan(11, 5, seed=3).test_sizes(), [3, 2, 2, 2, 2])

    def test_stratified_folds_are_balanced(self) -> None:
        labels = [0] * 50 + [1] * 50
        plan = make_fold_plan(100, 10, seed=1, stratify_labels=labels)
        y = np.asarray(labels)
        for fold in plan.folds:
            test = np.asarray(fold.test_indices)
            self.assertEqual(int(np.sum(y[test] == 0)), 5)
            self.assertEqual(int(np.sum(y[test] == 1)), 5)
        self.assertTrue(plan.stratified)

    def test_coverage_and_validation_share(self) -> None:
        for n in range(50, 61):
            for k in (5, 7, 10):
                plan = make_fold_plan(n, k, seed=n * k)
                sizes = plan.test_sizes()
                self.assertLessEqual(max(sizes) - min(sizes), 1)
                for fold in plan.folds:
                    fit = len(fold.fit_indices)
                    self.assertEqual(len(fold.validation_indices), round(0.2 * fit))
                    self.assertEqual(fit + len(fold.test_indices), n)

    def test_deterministic(self) -> None:
        labels = [0, 1] * 20
        a = make_fold_plan(40, 7, seed=9, stratify_labels=labels)
        b = make_fold_plan(40, 7, seed=9, stratify_labels=labels)
        self.assertEqual(a.to_dict(), b.to_dict())
        self.assertNotEqual(a.to_dict(), make_fold_plan(40, 7, seed=10, stratify_labels=labels).to_dict())

    def test_round_trips_through_dict(self) -> None:
        plan = make_fold_plan(23, 4, seed=2)
        self.assertEqual(FoldPlan.from_dict(plan.to_dict()), plan)

    def test_tampered_plan_is_rejected(self) -> None:
        doc = make_fold_plan(10, 5, seed=0).to_dict()
        doc["folds"][1]["test"] = doc["folds"][1]["test"] + doc["folds"][0]["test"][:1]
        with self.assertRaises(FoldPlanError):
            FoldPlan.from_dict(doc)

    def test_plan_with_missing_fold_is_rejected(self) -> None:
        doc = make_fold_plan(10, 5, seed=0).to_dict()
        doc["folds"] = doc["folds"][:-1]
        with self.assertRaises(FoldPlanError):
            FoldPlan.from_dict(doc)

    def test_invalid_fold_counts(self) -> None:
        with self.assertRaises(InvalidFoldCountError):
            make_fold_plan(5, 6, seed=0)
        with self.assertRaises(InvalidFoldCountError):
            make_fold_plan(5, 1, seed=0)

    def test_label_length_mismatch(self) -> None:
        with self.assertRaises(ShapeMismatchError):
            make_fold_plan(5, 2, seed=0, stratify_labels=[0, 1])


class FoldPlanPropertyTest(unittest.TestCase):
    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(min_value=2, max_value=120),
        k_frac=st.floats(min_value=0.0, max_value=1.0),
        seed=st.integers(min_value=0, max_value=2**31),
        stratify=st.booleans(),
    )
    def test_test_sets_partition_the_indices(self, n: int, k_frac: float, seed: int, stratify: bool) -> None:
        k = 2 + int(k_frac * (n - 2))
        labels = [i % 2 for i in range(n)] if stratify else None
        plan = make_fold_plan(n, k, seed, stratify_labels=labels)
        tests = [set(f.test_indices) for f in plan.folds]
        self.assertEqual(set().union(*tests), set(range(n)))
        self.assertEqual(sum(len(t) for t in tests), n)
        for fold in plan.folds:
            self.assertFalse(set(fold.fit_indices) & set(fold.test_indices))


if __name__ == "__main__":
    unittest.main()
