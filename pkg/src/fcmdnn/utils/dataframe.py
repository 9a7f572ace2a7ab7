"""Helpers de DataFrame para tablas de resultados."""

from __future__ import annotations

from typing import Any, Iterable, Sequence

import pandas as pd

from fcmdnn.evaluation.metrics import CSV_COLUMNS, MetricsReport

KEY_COLUMNS = ("model", "k", "aggregation")


def metrics_row(model: str, k: int, report: MetricsReport, aggregation: str = "pooled") -> dict[str, Any]:
    """Una fila modelo × k con las columnas de criterios en orden fijo."""
    return {"model": model, "k": k, "aggregation": aggregation, **report.csv_row()}


def metrics_row_from_dict(model: str, k: int, metrics: dict[str, Any], aggregation: str = "pooled") -> dict[str, Any]:
    """Igual que `metrics_row` pero desde `MetricsReport.to_dict()` (reportes en JSON)."""
    values = (
        metrics.get("acc"),
        metrics.get("ppv"),
        metrics.get("sen"),
        metrics.get("spc"),
        metrics.get("f1"),
        metrics.get("fpr_percent"),
        metrics.get("fnr_percent"),
        metrics.get("auc"),
    )
    return {"model": model, "k": k, "aggregation": aggregation, **dict(zip(CSV_COLUMNS, values))}


def metrics_frame(rows: Iterable[dict[str, Any]]) -> pd.DataFrame:
    """DataFrame de filas modelo × k, ordenado por (model, k, aggregation).

    Args:
        rows (Iterable[dict]): Filas de `metrics_row`.

    Returns:
        pd.DataFrame: Columnas model, k, aggregation + ACC ... AUC.
    """
    frame = pd.DataFrame(list(rows), columns=[*KEY_COLUMNS, *CSV_COLUMNS])
    return frame.sort_values(list(KEY_COLUMNS), kind="stable").reset_index(drop=True)


def roc_frame(curve: Sequence[tuple[float, float]]) -> pd.DataFrame:
    """Puntos de la curva ROC como DataFrame (fpr, tpr)."""
    return pd.DataFrame(list(curve), columns=["fpr", "tpr"])


def metrics_table_str(frame: pd.DataFrame, digits: int = 4) -> str:
    """Tabla de métricas como texto, con indefinidos marcados como 'nd'."""
    shown = frame.copy()
    for col in CSV_COLUMNS:
        shown[col] = shown[col].map(lambda v: "nd" if v is None or pd.isna(v) else f"{v:.{digits}f}")
    return shown.to_string(index=False)
