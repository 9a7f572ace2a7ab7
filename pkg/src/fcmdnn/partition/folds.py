"""Planes de validación cruzada K-fold.

Reglas:
  - Los índices se barajan con una permutación determinista por semilla.
  - La secuencia barajada se reparte round-robin entre los K folds: los
    primeros n mod K folds reciben una muestra extra.
  - Estratificado: la secuencia se agrupa por clase (cada clase en su orden
    barajado) antes del reparto, así cada fold recibe la proporción global
    de cada clase con diferencia de a lo sumo 1.
  - Dentro de cada fold, el 20% final (en orden barajado) de la porción no
    test es validación; el resto es entrenamiento.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from fcmdnn.errors import FoldPlanError, InvalidFoldCountError, ShapeMismatchError

VALIDATION_FRACTION = 0.2


@dataclass(frozen=True)
class FoldAssignment:
    """Roles de los índices en un fold.

    Attributes:
      test_indices: Índices de test (ordenados).
      train_indices: Índices de entrenamiento (ordenados).
      validation_indices: Índices de validación (ordenados).
    """

    test_indices: tuple[int, ...]
    train_indices: tuple[int, ...]
    validation_indices: tuple[int, ...]

    @property
    def fit_indices(self) -> tuple[int, ...]:
        """Índices que pueden tocar un camino de ajuste (train ∪ validation)."""
        return tuple(sorted(self.train_indices + self.validation_indices))


@dataclass(frozen=True)
class FoldPlan:
    """Plan K-fold completo e inmutable.

    Attributes:
      k: Cantidad de folds.
      folds: Un FoldAssignment por fold.
      seed: Semilla de la permutación.
      n: Cantidad de muestras.
      stratified: Si el reparto fue estratificado por clase.
    """

    k: int
    folds: tuple[FoldAssignment, ...]
    seed: int
    n: int
    stratified: bool = False

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        """Verifica cobertura, disyunción y tamaño de validación.

        Raises:
            FoldPlanError: Si algún invariante no se cumple.
        """
        if len(self.folds) != self.k:
            raise FoldPlanError(f"Se esperaban {self.k} folds, hay {len(self.folds)}.")
        universe = set(range(self.n))
        seen: set[int] = set()
        for i, fold in enumerate(self.folds):
            test, train, val = set(fold.test_indices), set(fold.train_indices), set(fold.validation_indices)
            if test & seen:
                raise FoldPlanError(f"Fold {i}: índices de test repetidos entre folds.")
            seen |= test
            if (test & train) or (test & val) or (train & val):
                raise FoldPlanError(f"Fold {i}: train/validation/test se solapan.")
            if test | train | val != universe:
                raise FoldPlanError(f"Fold {i}: train ∪ validation ∪ test no cubre [0, {self.n}).")
            expected_val = round(VALIDATION_FRACTION * (len(train) + len(val)))
            if len(val) != expected_val:
                raise FoldPlanError(f"Fold {i}: |validation|={len(val)} != {expected_val}.")
        if seen != universe:
            raise FoldPlanError("La unión de los test sets no cubre todos los índices.")

    def test_sizes(self) -> list[int]:
        return [len(f.test_indices) for f in self.folds]

    def to_dict(self) -> dict[str, Any]:
        """Serializa a un dict JSON-friendly."""
        return {
            "k": self.k,
            "n": self.n,
            "seed": self.seed,
            "stratified": self.stratified,
            "folds": [
                {
                    "test": list(f.test_indices),
                    "train": list(f.train_indices),
                    "validation": list(f.validation_indices),
                }
                for f in self.folds
            ],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FoldPlan":
        """Reconstruye (y valida) un plan desde `to_dict`."""
        folds = tuple(
            FoldAssignment(
                test_indices=tuple(int(i) for i in f["test"]),
                train_indices=tuple(int(i) for i in f["train"]),
                validation_indices=tuple(int(i) for i in f["validation"]),
            )
            for f in data["folds"]
        )
        return cls(
            k=int(data["k"]),
            folds=folds,
            seed=int(data["seed"]),
            n=int(data["n"]),
            stratified=bool(data.get("stratified", False)),
        )


def make_fold_plan(
    n: int,
    k: int,
    seed: int,
    stratify_labels: Sequence[int] | None = None,
) -> FoldPlan:
    """Construye un plan K-fold determinista.

    Args:
      n: Cantidad de muestras.
      k: Cantidad de folds (2 <= k <= n).
      seed: Semilla de la permutación.
      stratify_labels: Etiquetas para estratificar (largo n) o None.

    Returns:
      FoldPlan validado.

    Raises:
      InvalidFoldCountError: Si k < 2 o k > n.
      ShapeMismatchError: Si len(stratify_labels) != n.
    """
    if k < 2 or k > n:
        raise InvalidFoldCountError(f"k={k} inválido para n={n} (se requiere 2 <= k <= n).")
    if stratify_labels is not None and len(stratify_labels) != n:
        raise ShapeMismatchError(
            f"stratify_labels tiene largo {len(stratify_labels)}, se esperaba {n}."
        )

    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)

    if stratify_labels is None:
        sequence = perm
    else:
        labels = np.asarray(stratify_labels)
        perm_labels = labels[perm]
        sequence = np.concatenate([perm[perm_labels == c] for c in np.unique(labels)])

    fold_of = np.empty(n, dtype=np.int64)
    fold_of[sequence] = np.arange(n) % k

    folds: list[FoldAssignment] = []
    for f in range(k):
        test = np.sort(np.flatnonzero(fold_of == f))
        non_test = perm[fold_of[perm] != f]
        n_val = round(VALIDATION_FRACTION * non_test.size)
        split = non_test.size - n_val
        folds.append(
            FoldAssignment(
                test_indices=tuple(int(i) for i in test),
                train_indices=tuple(int(i) for i in np.sort(non_test[:split])),
                validation_indices=tuple(int(i) for i in np.sort(non_test[split:])),
            )
        )

    return FoldPlan(
        k=k,
        folds=tuple(folds),
        seed=seed,
        n=n,
        stratified=stratify_labels is not None,
    )
