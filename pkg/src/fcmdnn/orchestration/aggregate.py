"""Agregación de reportes por fold: pooled y promedio."""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

from fcmdnn.errors import InsufficientDataError, UndefinedMetricError
from fcmdnn.evaluation.metrics import ConfusionMatrix, MetricsReport, report, roc_auc

MEAN_FIELDS = ("acc", "ppv", "sen", "spc", "f1", "auc")

ScoredFold = tuple[Sequence[float], Sequence[int]]


def _pooled(fold_reports: Sequence[MetricsReport], scored: Sequence[ScoredFold] | None) -> MetricsReport:
    cm = reduce(lambda a, b: a + b, (r.cm for r in fold_reports), ConfusionMatrix())
    pooled = report(cm)
    if scored is None:
        return pooled
    scores = np.concatenate([np.asarray(s, dtype=np.float64) for s, _ in scored])
    actual = np.concatenate([np.asarray(a, dtype=np.int64) for _, a in scored])
    try:
        auc, _ = roc_auc(scores, actual)
    except UndefinedMetricError as exc:
        return pooled.with_auc(None, str(exc))
    return pooled.with_auc(auc)


def _mean(fold_reports: Sequence[MetricsReport], cm: ConfusionMatrix) -> MetricsReport:
    values: dict[str, float | None] = {}
    undefined: dict[str, str] = {}
    for name in MEAN_FIELDS:
        defined = [getattr(r, name) for r in fold_reports if getattr(r, name) is not None]
        missing = len(fold_reports) - len(defined)
        values[name] = float(np.mean(defined)) if defined else None
        if missing:
            undefined[name] = f"indefinida en {missing} de {len(fold_reports)} folds"
    spc, sen = values["spc"], values["sen"]
    return MetricsReport(
        cm=cm,
        acc=values["acc"],
        ppv=values["ppv"],
        sen=sen,
        spc=spc,
        f1=values["f1"],
        fpr=None if spc is None else 1.0 - spc,
        fnr=None if sen is None else 1.0 - sen,
        auc=values["auc"],
        undefined=undefined,
    )


def aggregate(
    fold_reports: Sequence[MetricsReport],
    scored: Sequence[ScoredFold] | None = None,
) -> tuple[MetricsReport, MetricsReport]:
    """Combina los reportes de todos los folds.

    - pooled: métricas sobre la suma de matrices de confusión; AUC sobre los
      scores concatenados (si se pasan).
    - mean: promedio simple de cada criterio por fold; los folds con el
      criterio indefinido se excluyen y se cuentan en `undefined`. FPR y FNR
      se derivan del promedio de SPC y SEN. Lleva la matriz pooled.

    Args:
      fold_reports: Un MetricsReport por fold (orden por índice de fold).
      scored: (scores, actual) por fold, en el mismo orden.

    Returns:
      (pooled, mean).

    Raises:
      InsufficientDataError: Si no hay reportes.
    """
    if not fold_reports:
        raise InsufficientDataError("aggregate requiere al menos un reporte de fold.")
    pooled = _pooled(fold_reports, scored)
    return pooled, _mean(fold_reports, pooled.cm)
