"""Cliente IO para artefactos de una corrida (JSON / CSV).

Layout del directorio de salida:

  out/
    run_report.json      RunReport completo
    metrics.csv          fila pooled + fila mean (ACC ... AUC)
    fold_plan.json       FoldPlan
    experiment.json      ExperimentConfig efectiva
    seeds.json           ledger de semillas
    roc/fold_XX.csv      curva ROC de cada fold
    roc/pooled.csv       curva ROC sobre los scores concatenados
    models/fold_XX.json  modelo serializado de cada fold

Los JSON se escriben con claves ordenadas; los CSV con pandas.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from fcmdnn.errors import ConfigurationError, UndefinedMetricError
from fcmdnn.evaluation.metrics import roc_auc
from fcmdnn.utils.dataframe import roc_frame, metrics_frame, metrics_row
from fcmdnn.utils.logging import get_logger

log = get_logger(__name__)

RUN_REPORT = "run_report.json"
METRICS_CSV = "metrics.csv"
FOLD_PLAN = "fold_plan.json"
EXPERIMENT = "experiment.json"
SEEDS = "seeds.json"
ROC_DIR = "roc"
MODELS_DIR = "models"


def model_file(fold: int) -> str:
    return f"fold_{fold:02d}.json"


@dataclass(frozen=True)
class ArtifactWriter:
    """Escribe y lee artefactos bajo un directorio raíz.

    Attributes:
      root: Directorio de la corrida.
    """

    root: Path

    def path(self, *parts: str) -> Path:
        return Path(self.root).joinpath(*parts)

    def write_json(self, name: str, data: Any) -> Path:
        p = self.path(name)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return p

    def read_json(self, name: str) -> Any:
        """Lee un JSON del directorio.

        Raises:
          ConfigurationError: Si el archivo no existe o no es JSON válido.
        """
        p = self.path(name)
        if not p.is_file():
            raise ConfigurationError(f"No existe el artefacto: {p}")
        try:
            return json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"Artefacto JSON inválido en {p}: {exc}") from exc

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        p = self.path(name)
        p.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(p, index=False, float_format="%.10g")
        return p

    def write_run(self, report, experiment: dict[str, Any]) -> list[Path]:
        """Escribe todos los artefactos de un RunReport.

        Args:
          report: RunReport (con `plan` y `models`).
          experiment: ExperimentConfig efectiva como dict.

        Returns:
          Rutas escritas.
        """
        written = [
            self.write_text(RUN_REPORT, report.to_json() + "\n"),
            self.write_json(EXPERIMENT, experiment),
            self.write_json(SEEDS, report.seeds),
        ]
        if report.plan is not None:
            written.append(self.write_json(FOLD_PLAN, report.plan.to_dict()))

        rows = [
            metrics_row(report.model, report.k, report.pooled, "pooled"),
            metrics_row(report.model, report.k, report.mean, "mean"),
        ]
        written.append(self.write_csv(METRICS_CSV, metrics_frame(rows)))

        for fold in report.folds:
            curve = self._curve(fold.scores, fold.actual)
            if curve is not None:
                written.append(self.write_csv(f"{ROC_DIR}/fold_{fold.fold:02d}.csv", roc_frame(curve)))
        pooled_curve = self._curve(
            np.concatenate([f.scores for f in report.folds]),
            np.concatenate([f.actual for f in report.folds]),
        )
        if pooled_curve is not None:
            written.append(self.write_csv(f"{ROC_DIR}/pooled.csv", roc_frame(pooled_curve)))

        for model in report.models:
            written.append(model.save(self.path(MODELS_DIR, model_file(model.fold))))

        log.info("Artefactos OK | out=%s | archivos=%d", self.root, len(written))
        return written

    def write_text(self, name: str, text: str) -> Path:
        p = self.path(name)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
        return p

    @staticmethod
    def _curve(scores: np.ndarray, actual: np.ndarray):
        try:
            _, curve = roc_auc(scores, actual)
        except UndefinedMetricError:
            return None
        return curve
