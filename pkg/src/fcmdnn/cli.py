"""CLI de fcmdnn.

Comandos:
  - synth: genera un dataset sintético en el layout cargable.
  - preprocess: redimensiona un dataset y lo escribe en el mismo layout.
  - train: corre K-fold (nn | dnn | fcm-dnn) y escribe los artefactos.
  - evaluate: re-predice con los modelos congelados de una corrida.
  - report: junta varios run_report.json en una tabla (ACC ... AUC).
  - config: imprime los settings efectivos.
  - schema: imprime el JSON schema de la configuración de experimento.

Códigos de salida: 0 ok, 1 error de datos/ejecución, 2 error de uso/validación.

Ejemplos:
  poetry run fcmdnn synth --healthy 200 --sick 200 --side 16 --seed 7 --out data/synth
  poetry run fcmdnn train --model dnn --data data/synth --folds 10 --out runs/dnn_k10
  poetry run fcmdnn evaluate --model-dir runs/dnn_k10 --data data/synth --fold 3
"""

from __future__ import annotations

import json
import logging
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Iterator, List, Optional

import numpy as np
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from fcmdnn.config import ExperimentConfig, ModelKind, PreprocessConfig, load_experiment_config
from fcmdnn.data.dataset import load_dataset, write_dataset
from fcmdnn.data.synthetic import gen_synthetic
from fcmdnn.errors import ConfigurationError, FcmDnnError
from fcmdnn.evaluation.metrics import CSV_COLUMNS, MetricsReport, evaluate_binary
from fcmdnn.io.artifacts import MODELS_DIR, RUN_REPORT, ArtifactWriter
from fcmdnn.logging_config import setup_logging
from fcmdnn.orchestration.fold_model import FoldModel
from fcmdnn.orchestration.runner import run_experiment
from fcmdnn.preprocess.pipeline import apply_pipeline, get_preprocess_pipeline
from fcmdnn.settings import FcmDnnSettings
from fcmdnn.utils.dataframe import metrics_table_str, metrics_frame, metrics_row_from_dict

settings = FcmDnnSettings()
log = logging.getLogger(__name__)
try:
    setup_logging(settings.log_level)
except ConfigurationError as exc:
    setup_logging("INFO")
    log.warning("%s; se usa INFO", exc)

console = Console()

app = typer.Typer(
    no_args_is_help=True,
    add_completion=False,
    help="NN / DNN / FCM-DNN sobre imágenes en escala de grises, con K-fold y métricas.",
)


class CliModel(str, Enum):
    nn = "nn"
    dnn = "dnn"
    fcm_dnn = "fcm-dnn"

    def kind(self) -> ModelKind:
        return ModelKind(self.value.replace("-", "_"))


class ImageFormat(str, Enum):
    pgm = "pgm"
    png = "png"


@contextmanager
def _exit_on_error() -> Iterator[None]:
    """Traduce errores del proyecto a códigos de salida."""
    try:
        yield
    except FcmDnnError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        raise typer.Exit(code=exc.exit_code) from exc
    except ValidationError as exc:
        log.error("Configuración inválida:\n%s", exc)
        raise typer.Exit(code=2) from exc


def _apply_log_level(log_level: Optional[str]) -> None:
    if log_level is not None:
        setup_logging(log_level)


def _seed_or_default(seed: Optional[int]) -> int:
    return seed if seed is not None else FcmDnnSettings().seed


def _print_metrics(title: str, rows: list[tuple[str, MetricsReport]]) -> None:
    table = Table(title=title)
    table.add_column("")
    for col in CSV_COLUMNS:
        table.add_column(col, justify="right")
    for name, rep in rows:
        cells = ["nd" if v is None else f"{v:.4f}" for v in rep.csv_row().values()]
        table.add_row(name, *cells)
    console.print(table)


@app.command("synth")
def synth(
    healthy: int = typer.Option(..., "--healthy", min=1, help="Cantidad de imágenes Healthy."),
    sick: int = typer.Option(..., "--sick", min=1, help="Cantidad de imágenes Sick."),
    side: int = typer.Option(..., "--side", help="Lado de la imagen (>= 4)."),
    out: Path = typer.Option(..., "--out", file_okay=False, help="Directorio destino."),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Semilla (por defecto FCMDNN_SEED)."),
    subpatterns: int = typer.Option(1, "--subpatterns", min=1, help="Sub-patrones por clase."),
    image_format: ImageFormat = typer.Option(ImageFormat.pgm, "--format", help="pgm o png."),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Nivel de logging."),
) -> None:
    """Genera un dataset sintético (healthy/ + sick/ + manifest.json)."""
    with _exit_on_error():
        _apply_log_level(log_level)
        seed = _seed_or_default(seed)
        dataset = gen_synthetic(healthy, sick, side, seed, subpatterns=subpatterns)
        try:
            manifest = write_dataset(dataset, out, suffix=f".{image_format.value}")
        except OSError as exc:
            raise ConfigurationError(f"No se puede escribir en {out}: {exc}") from exc
        typer.echo(f"Dataset sintético escrito | n={dataset.n} | manifest={manifest}")


@app.command("preprocess")
def preprocess_cmd(
    data: Path = typer.Option(..., "--data", file_okay=False, help="Dataset de entrada."),
    out: Path = typer.Option(..., "--out", file_okay=False, help="Directorio destino."),
    side: int = typer.Option(100, "--side", min=1, help="Lado objetivo."),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Nivel de logging."),
) -> None:
    """Redimensiona un dataset al lado objetivo y lo escribe en el layout cargable."""
    with _exit_on_error():
        _apply_log_level(log_level)
        dataset = load_dataset(data)
        config = PreprocessConfig(target_side=side)
        resized = apply_pipeline(dataset, get_preprocess_pipeline(config, with_normalize=False))
        write_dataset(resized, out, manifest_extra={"side": side, "source": str(data)})
        counts = resized.class_counts()
        typer.echo(f"Preprocesado OK | n={resized.n} | healthy={counts[0]} | sick={counts[1]} | side={side}")


@app.command("train")
def train_cmd(
    model: CliModel = typer.Option(..., "--model", help="nn, dnn o fcm-dnn."),
    data: Path = typer.Option(..., "--data", file_okay=False, help="Dataset (healthy/ + sick/)."),
    out: Optional[Path] = typer.Option(None, "--out", file_okay=False, help="Directorio de artefactos."),
    folds: Optional[int] = typer.Option(None, "--folds", help="K (5, 7 o 10)."),
    config_file: Optional[Path] = typer.Option(None, "--config", dir_okay=False, help="JSON sobre el preset."),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Semilla maestra (por defecto FCMDNN_SEED)."),
    clusters_per_class: Optional[int] = typer.Option(None, "--clusters-per-class", help="Clusters por clase."),
    side: Optional[int] = typer.Option(None, "--side", help="Lado objetivo del resize."),
    epochs: Optional[int] = typer.Option(None, "--epochs", help="Sobrescribe las epochs de la red."),
    jobs: Optional[int] = typer.Option(None, "--jobs", min=1, help="Folds en paralelo."),
    fit_before_split: Optional[bool] = typer.Option(
        None, "--fit-before-split/--fit-per-fold",
        help="Normaliza/clusteriza todo el dataset antes de particionar.",
    ),
    paper_order: bool = typer.Option(False, "--paper-order", help="Alias de --fit-before-split."),
    audit: Optional[bool] = typer.Option(None, "--audit/--no-audit", help="Auditoría de fuga por ids."),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Nivel de logging."),
) -> None:
    """Corre K-fold con el modelo elegido y escribe RunReport, CSV, ROC y modelos."""
    run_settings = FcmDnnSettings()
    with _exit_on_error():
        _apply_log_level(log_level)
        overrides: dict = {
            "folds": folds,
            "master_seed": _seed_or_default(seed),
            "clusters_per_class": clusters_per_class,
            "fit_before_split": paper_order or (
                fit_before_split if fit_before_split is not None else run_settings.fit_before_split
            ),
        }
        if side is not None:
            overrides["preprocess"] = {"target_side": side}
        if epochs is not None:
            overrides["network"] = {"epochs": epochs}
        config = load_experiment_config(config_file, model.kind(), **overrides)

        dataset = load_dataset(data)
        report = run_experiment(
            dataset,
            config,
            jobs=jobs or run_settings.jobs,
            audit=run_settings.audit if audit is None else audit,
        )
        out_dir = out or Path(run_settings.out_dir) / f"{config.model.value}_k{config.folds}"
        ArtifactWriter(out_dir).write_run(report, config.model_dump(mode="json"))

    _print_metrics(
        f"{model.value} | k={report.k} | n={report.n}",
        [("pooled", report.pooled), ("mean", report.mean)],
    )
    typer.echo(f"Artefactos en {out_dir}")


def _models_dir(model_dir: Path) -> Path:
    nested = model_dir / MODELS_DIR
    return nested if nested.is_dir() else model_dir


@app.command("evaluate")
def evaluate_cmd(
    model_dir: Path = typer.Option(..., "--model-dir", file_okay=False, help="Corrida o su carpeta models/."),
    data: Path = typer.Option(..., "--data", file_okay=False, help="Dataset a evaluar."),
    fold: Optional[int] = typer.Option(None, "--fold", min=0, help="Solo este fold."),
    all_samples: bool = typer.Option(False, "--all-samples", help="Evalúa cada modelo sobre todo el dataset."),
    out: Optional[Path] = typer.Option(None, "--out", dir_okay=False, help="Escribe las métricas en este JSON."),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Nivel de logging."),
) -> None:
    """Re-predice con modelos congelados e imprime las métricas por fold (JSON)."""
    with _exit_on_error():
        _apply_log_level(log_level)
        folder = _models_dir(model_dir)
        paths = sorted(folder.glob("fold_*.json"))
        if fold is not None:
            paths = [p for p in paths if p.name == f"fold_{fold:02d}.json"]
        if not paths:
            raise ConfigurationError(f"No hay modelos de fold en {folder}")

        dataset = load_dataset(data)
        results: dict[str, dict] = {}
        resized_by_side: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        for path in paths:
            fold_model = FoldModel.load(path)
            side = fold_model.target_side
            if side not in resized_by_side:
                resized = apply_pipeline(
                    dataset, get_preprocess_pipeline(PreprocessConfig(target_side=side), with_normalize=False)
                )
                resized_by_side[side] = (resized.matrix(), resized.labels())
            X, y = resized_by_side[side]
            if all_samples:
                ids = np.arange(y.size)
            else:
                ids = np.asarray(fold_model.test_ids, dtype=np.int64)
                if ids.size and ids.max() >= y.size:
                    raise ConfigurationError(
                        f"Fold {fold_model.fold}: ids de test fuera del dataset (n={y.size}); ¿es el mismo dataset?"
                    )
            pred = fold_model.predict(X[ids])
            rep = evaluate_binary(pred.labels, y[ids], pred.scores)
            results[f"fold_{fold_model.fold:02d}"] = rep.to_dict()
            log.info("Evaluación OK | fold=%d | n=%d | acc=%.4f", fold_model.fold, ids.size, rep.acc)

    text = json.dumps(results, indent=2, sort_keys=True)
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
    typer.echo(text)


@app.command("report")
def report_cmd(
    runs: List[Path] = typer.Argument(..., help="Directorios de corridas (con run_report.json)."),
    out: Optional[Path] = typer.Option(None, "--out", dir_okay=False, help="CSV de salida."),
) -> None:
    """Junta varias corridas en una tabla modelo × k (pooled y mean)."""
    with _exit_on_error():
        rows = []
        for run_dir in runs:
            doc = ArtifactWriter(run_dir).read_json(RUN_REPORT)
            for aggregation in ("pooled", "mean"):
                rows.append(metrics_row_from_dict(doc["model"], doc["k"], doc[aggregation], aggregation))
        frame = metrics_frame(rows)
        if out is not None:
            out.parent.mkdir(parents=True, exist_ok=True)
            frame.to_csv(out, index=False, float_format="%.10g")
    typer.echo(metrics_table_str(frame))


@app.command("config")
def config() -> None:
    """Imprime la configuración efectiva (entorno/.env + defaults)."""
    typer.echo(FcmDnnSettings().model_dump_json(indent=2))


@app.command("schema")
def schema() -> None:
    """Imprime el JSON schema de ExperimentConfig (formato de --config)."""
    typer.echo(json.dumps(ExperimentConfig.model_json_schema(), indent=2))


if __name__ == "__main__":
    app()
