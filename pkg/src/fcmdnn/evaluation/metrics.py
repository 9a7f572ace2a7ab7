"""Matriz de confusión, criterios de evaluación y ROC/AUC.

Convención (Sick = clase positiva por defecto):
  tp: positivo predicho y real positivo
  fp: positivo predicho y real negativo
  tn: negativo predicho y real negativo
  fn: negativo predicho y real positivo

Criterios:
  ACC = (tp + tn) / n
  PPV = tp / (tp + fp)
  SEN = tp / (tp + fn)
  SPC = tn / (tn + fp)
  F1  = 2·tp / (2·tp + fp + fn)
  FPR = 1 − SPC
  FNR = 1 − SEN

Un criterio con denominador cero queda indefinido (None) y su causa se
registra en `undefined`; nunca se reporta como 0.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Any, Sequence

import numpy as np
import pandas as pd
from sklearn.metrics import confusion_matrix, roc_curve

from fcmdnn.data.dataset import SICK
from fcmdnn.errors import DomainError, ShapeMismatchError, UndefinedMetricError

CSV_COLUMNS = ("ACC", "PPV", "SEN", "SPC", "F1-Score", "FPR", "FNR", "AUC")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "tn", "fn"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name}={value} debe ser un conteo no negativo.")
            object.__setattr__(self, name, int(value))

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            tn=self.tn + other.tn,
            fn=self.fn + other.fn,
        )

    def to_dict(self) -> dict[str, int]:
        return asdict(self)


def confusion(
    predicted: Sequence[int],
    actual: Sequence[int],
    positive_class: int = SICK,
) -> ConfusionMatrix:
    """Cuenta tp/fp/tn/fn.

    Args:
      predicted: Etiquetas predichas (binarias).
      actual: Etiquetas reales (binarias).
      positive_class: Clase considerada positiva.

    Returns:
      ConfusionMatrix.

    Raises:
      ShapeMismatchError: Si los largos difieren.
      DomainError: Si alguna etiqueta no es 0/1.
    """
    pred = np.asarray(predicted, dtype=np.int64).reshape(-1)
    act = np.asarray(actual, dtype=np.int64).reshape(-1)
    if pred.size != act.size:
        raise ShapeMismatchError(f"predicted tiene {pred.size} etiquetas y actual {act.size}.")
    for arr in (pred, act):
        if not np.all((arr == 0) | (arr == 1)):
            raise DomainError("Las etiquetas deben ser binarias (0/1).")
    if pred.size == 0:
        return ConfusionMatrix()
    tn, fp, fn, tp = confusion_matrix(act, pred, labels=[1 - positive_class, positive_class]).ravel()
    return ConfusionMatrix(tp=int(tp), fp=int(fp), tn=int(tn), fn=int(fn))


@dataclass(frozen=True)
class MetricsReport:
    """Criterios de evaluación de una matriz de confusión.

    Attributes:
      cm: Matriz de origen.
      acc, ppv, sen, spc, f1, fpr, fnr: Fracciones en [0, 1] o None si indefinidas.
      auc: Área bajo la curva ROC (None si no se calculó o es indefinida).
      undefined: Criterio -> causa, para los indefinidos.
    """

    cm: ConfusionMatrix
    acc: float | None
    ppv: float | None
    sen: float | None
    spc: float | None
    f1: float | None
    fpr: float | None
    fnr: float | None
    auc: float | None = None
    undefined: dict[str, str] = field(default_factory=dict)

    @property
    def fpr_percent(self) -> float | None:
        return None if self.fpr is None else 100.0 * self.fpr

    @property
    def fnr_percent(self) -> float | None:
        return None if self.fnr is None else 100.0 * self.fnr

    def with_auc(self, auc: float | None, cause: str | None = None) -> "MetricsReport":
        undefined = dict(self.undefined)
        if auc is None:
            undefined["auc"] = cause or "auc no calculada"
        else:
            undefined.pop("auc", None)
        return replace(self, auc=auc, undefined=undefined)

    def to_dict(self) -> dict[str, Any]:
        return {
            "cm": self.cm.to_dict(),
            "acc": self.acc,
            "ppv": self.ppv,
            "sen": self.sen,
            "spc": self.spc,
            "f1": self.f1,
            "fpr": self.fpr,
            "fnr": self.fnr,
            "fpr_percent": self.fpr_percent,
            "fnr_percent": self.fnr_percent,
            "auc": self.auc,
            "undefined": dict(sorted(self.undefined.items())),
        }

    def csv_row(self) -> dict[str, float | None]:
        """Fila con las columnas ACC, PPV, SEN, SPC, F1-Score, FPR, FNR, AUC (FPR/FNR en %)."""
        values = (self.acc, self.ppv, self.sen, self.spc, self.f1, self.fpr_percent, self.fnr_percent, self.auc)
        return dict(zip(CSV_COLUMNS, values))


def _ratio(num: int, den: int, name: str, undefined: dict[str, str]) -> float | None:
    if den == 0:
        undefined[name] = f"denominador cero en {name}"
        return None
    return num / den


def report(cm: ConfusionMatrix) -> MetricsReport:
    """Calcula todos los criterios (sin AUC).

    Raises:
      UndefinedMetricError: Si la matriz está vacía.
    """
    if cm.n == 0:
        raise UndefinedMetricError("Matriz de confusión vacía: no hay muestras evaluadas.")
    undefined: dict[str, str] = {}
    acc = (cm.tp + cm.tn) / cm.n
    ppv = _ratio(cm.tp, cm.tp + cm.fp, "ppv", undefined)
    sen = _ratio(cm.tp, cm.tp + cm.fn, "sen", undefined)
    spc = _ratio(cm.tn, cm.tn + cm.fp, "spc", undefined)

    if ppv is None or sen is None:
        undefined["f1"] = "ppv o sen indefinidos"
        f1 = None
    else:
        f1 = 2 * cm.tp / (2 * cm.tp + cm.fp + cm.fn)

    fpr = None if spc is None else 1.0 - spc
    fnr = None if sen is None else 1.0 - sen
    if spc is None:
        undefined["fpr"] = "spc indefinida"
    if sen is None:
        undefined["fnr"] = "sen indefinida"
    undefined["auc"] = "auc no calculada"

    return MetricsReport(
        cm=cm, acc=acc, ppv=ppv, sen=sen, spc=spc, f1=f1, fpr=fpr, fnr=fnr, undefined=undefined,
    )


def roc_auc(
    scores: Sequence[float],
    actual: Sequence[int],
    positive_class: int = SICK,
) -> tuple[float, list[tuple[float, float]]]:
    """AUC por rangos y curva ROC.

    AUC = P(score positivo > score negativo) con empates contando ½, vía
    rangos promedio. La curva sale de `roc_curve` sin descartar umbrales:
    un punto (fpr, tpr) por cada score distinto, desde (0, 0) hasta (1, 1).

    Args:
      scores: Score de la clase positiva por muestra.
      actual: Etiquetas reales.
      positive_class: Clase positiva.

    Returns:
      (auc, curva).

    Raises:
      ShapeMismatchError: Si los largos difieren.
      UndefinedMetricError: Si falta alguna de las dos clases.
    """
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    a = np.asarray(actual).reshape(-1)
    if s.size != a.size:
        raise ShapeMismatchError(f"scores tiene {s.size} valores y actual {a.size}.")
    pos = a == positive_class
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC indefinida: se requieren ambas clases.")

    ranks = pd.Series(s).rank(method="average").to_numpy()
    auc = (ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)

    fpr, tpr, _ = roc_curve(pos, s, drop_intermediate=False)
    curve = [(float(x), float(y)) for x, y in zip(fpr, tpr)]
    if curve[0] != (0.0, 0.0):
        curve.insert(0, (0.0, 0.0))
    return float(auc), curve


def curve_area(curve: Sequence[tuple[float, float]]) -> float:
    """Área trapezoidal bajo una curva (fpr, tpr)."""
    pts = np.asarray(curve, dtype=np.float64)
    dx = np.diff(pts[:, 0])
    return float(np.sum(dx * (pts[1:, 1] + pts[:-1, 1]) / 2.0))


def evaluate_binary(
    predicted: Sequence[int],
    actual: Sequence[int],
    scores: Sequence[float] | None = None,
) -> MetricsReport:
    """confusion + report + AUC (si hay scores y ambas clases)."""
    rep = report(confusion(predicted, actual))
    if scores is None:
        return rep
    try:
        auc, _ = roc_auc(scores, actual)
    except UndefinedMetricError as exc:
        return rep.with_auc(None, str(exc))
    return rep.with_auc(auc)
