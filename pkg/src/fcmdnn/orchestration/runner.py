"""Orquestación de una corrida K-fold de punta a punta.

Este módulo coordina:
  1) Preprocesar (resize al lado objetivo; la normalización se ajusta por fold).
  2) Particionar con un FoldPlan derivado de la semilla maestra.
  3) Por fold: normalizar, (FCM-DNN) clusterizar cada clase, entrenar,
     predecir el test y calcular métricas.
  4) Agregar (pooled + promedio) y armar el RunReport.

Por defecto todo ajuste (min-max, FCM, red) usa solo train ∪ validation del
fold. Con `fit_before_split` la normalización y el clustering se hacen una
vez sobre todo el dataset antes del loop de folds; la auditoría entonces
registra la fuga en lugar de abortar.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from fcmdnn.cluster.fcm import cluster_jointly, cluster_per_class
from fcmdnn.config import STANDARD_FOLD_COUNTS, ExperimentConfig, ModelKind, Normalization, network_preset
from fcmdnn.data.dataset import Dataset
from fcmdnn.errors import InsufficientDataError
from fcmdnn.evaluation.metrics import MetricsReport, evaluate_binary
from fcmdnn.network.train import train
from fcmdnn.orchestration.aggregate import aggregate
from fcmdnn.orchestration.audit import LeakageAudit
from fcmdnn.orchestration.fold_model import FoldModel, HeadInfo, NormalizationState
from fcmdnn.orchestration.seeds import SeedLedger
from fcmdnn.partition.folds import FoldPlan, make_fold_plan
from fcmdnn.preprocess.normalize import fit_minmax
from fcmdnn.preprocess.pipeline import apply_pipeline, get_preprocess_pipeline
from fcmdnn.utils.logging import get_logger

log = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class FoldReport:
    """Resultado de un fold.

    Attributes:
      fold: Índice del fold.
      sizes: Tamaños de train / validation / test.
      metrics: Métricas binarias sobre el test.
      history: Pérdidas por epoch (train / validation).
      test_ids: Ids de test (orden creciente).
      actual: Clase real de cada id de test.
      labels: Clase predicha.
      scores: Score Sick.
      cluster_accuracy: Acierto de cluster (solo FCM-DNN).
      fcm: Resumen de los FCM ajustados en el fold (solo FCM-DNN).
    """

    fold: int
    sizes: dict[str, int]
    metrics: MetricsReport
    history: dict[str, list]
    test_ids: tuple[int, ...]
    actual: np.ndarray
    labels: np.ndarray
    scores: np.ndarray
    cluster_accuracy: float | None = None
    fcm: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "fold": self.fold,
            "sizes": self.sizes,
            "metrics": self.metrics.to_dict(),
            "history": self.history,
            "test_ids": list(self.test_ids),
            "actual": self.actual.tolist(),
            "labels": self.labels.tolist(),
            "scores": self.scores.tolist(),
            "cluster_accuracy": self.cluster_accuracy,
            "fcm": self.fcm,
        }


@dataclass(eq=False)
class RunReport:
    """Reporte de una corrida completa.

    `models` y `plan` no se serializan en el JSON del reporte; el CLI los
    escribe como artefactos aparte.
    """

    model: str
    k: int
    n: int
    folds: list[FoldReport]
    pooled: MetricsReport
    mean: MetricsReport
    config: dict[str, Any]
    seeds: dict[str, Any]
    duration_s: float
    warnings: list[str] = field(default_factory=list)
    audit: dict[str, Any] = field(default_factory=dict)
    cluster_accuracy: float | None = None
    plan: FoldPlan | None = None
    models: list[FoldModel] = field(default_factory=list, repr=False)

    def to_dict(self, include_timing: bool = True) -> dict[str, Any]:
        out = {
            "model": self.model,
            "k": self.k,
            "n": self.n,
            "folds": [f.to_dict() for f in self.folds],
            "pooled": self.pooled.to_dict(),
            "mean": self.mean.to_dict(),
            "config": self.config,
            "seeds": self.seeds,
            "warnings": list(self.warnings),
            "audit": self.audit,
            "cluster_accuracy": self.cluster_accuracy,
        }
        if include_timing:
            out["duration_s"] = self.duration_s
        return out

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)


@dataclass(eq=False)
class _Context:
    config: ExperimentConfig
    X: np.ndarray
    y: np.ndarray
    plan: FoldPlan
    ledger: SeedLedger
    audit: LeakageAudit
    global_norm: NormalizationState | None = None
    global_clustering: Any = None


def _fit_normalization(X: np.ndarray, ids: np.ndarray, mode: Normalization) -> NormalizationState:
    if mode == Normalization.scale_by_255:
        return NormalizationState(mode=mode)
    return NormalizationState(mode=mode, stats=fit_minmax(X[ids]))


def _cluster(config: ExperimentConfig, X: np.ndarray, y: np.ndarray, seed: int):
    fcm_cfg = config.fcm.model_copy(update={"seed": seed})
    if config.fcm.joint:
        return cluster_jointly(X, y, config.clusters_per_class, fcm_cfg)
    return cluster_per_class(X, y, config.clusters_per_class, fcm_cfg)


def _fcm_summary(clustering: Any) -> dict[str, Any]:
    states = getattr(clustering, "states", None)
    if states is None:
        state = clustering.state
        return {"joint": {"objective": state.final_objective, "iterations": state.iterations_run}}
    return {
        str(label): {"objective": s.final_objective, "iterations": s.iterations_run, "converged": s.converged}
        for label, s in sorted(states.items())
    }


def _run_fold(ctx: _Context, f: int) -> tuple[FoldReport, FoldModel]:
    cfg = ctx.config
    fold = ctx.plan.folds[f]
    train_ids = np.asarray(fold.train_indices, dtype=np.int64)
    val_ids = np.asarray(fold.validation_indices, dtype=np.int64)
    test_ids = np.asarray(fold.test_indices, dtype=np.int64)
    fit_ids = np.asarray(fold.fit_indices, dtype=np.int64)

    # * 1) Normalización
    if ctx.global_norm is not None:
        norm = ctx.global_norm
    else:
        norm = _fit_normalization(ctx.X, fit_ids, cfg.preprocess.normalization)
        if norm.stats is not None:
            ctx.audit.record(f, "normalize", fit_ids)
    Xn = norm.apply(ctx.X)

    # * 2) Targets (clusters para FCM-DNN)
    clustering = None
    if cfg.model == ModelKind.fcm_dnn:
        if ctx.global_clustering is not None:
            clustering = ctx.global_clustering
            targets = clustering.cluster_labels
        else:
            clustering = _cluster(cfg, Xn[fit_ids], ctx.y[fit_ids], ctx.ledger.derive("fcm", f))
            ctx.audit.record(f, "fcm", fit_ids)
            targets = np.full(ctx.y.size, -1, dtype=np.int64)
            targets[fit_ids] = clustering.cluster_labels
        head = HeadInfo(
            kind="cluster",
            cluster_classes=tuple(int(c) for c in clustering.cluster_classes),
            clusters_per_class=cfg.clusters_per_class,
        )
        n_outputs = clustering.num_clusters
    else:
        targets = ctx.y
        head = HeadInfo()
        n_outputs = 1

    # * 3) Entrenamiento
    spec = cfg.network.build(ctx.X.shape[1], n_outputs, seed=ctx.ledger.derive("network", f))
    validation = (Xn[val_ids], targets[val_ids]) if val_ids.size else None
    params, history = train(spec, (Xn[train_ids], targets[train_ids]), validation)
    ctx.audit.record(f, "network", np.concatenate([train_ids, val_ids]))

    # * 4) Test
    fold_model = FoldModel(
        params=params,
        normalization=norm,
        head=head,
        target_side=cfg.preprocess.target_side,
        fold=f,
        test_ids=tuple(int(i) for i in test_ids),
        model=cfg.model.value,
    )
    pred = fold_model.predict(ctx.X[test_ids])
    actual = ctx.y[test_ids]
    metrics = evaluate_binary(pred.labels, actual, pred.scores)

    cluster_accuracy = None
    fcm_info = None
    if clustering is not None:
        if ctx.global_clustering is not None:
            truth = clustering.cluster_labels[test_ids]
        else:
            truth = clustering.assign(Xn[test_ids], actual)
        cluster_accuracy = float(np.mean(pred.clusters == truth))
        fcm_info = _fcm_summary(clustering)

    ctx.audit.check(f, test_ids)
    log.info(
        "Fold %d/%d OK | train=%d | val=%d | test=%d | acc=%.4f | auc=%s",
        f + 1, ctx.plan.k, train_ids.size, val_ids.size, test_ids.size,
        metrics.acc, "nd" if metrics.auc is None else f"{metrics.auc:.4f}",
    )

    report = FoldReport(
        fold=f,
        sizes={"train": int(train_ids.size), "validation": int(val_ids.size), "test": int(test_ids.size)},
        metrics=metrics,
        history=history.to_dict(),
        test_ids=fold_model.test_ids,
        actual=actual,
        labels=pred.labels,
        scores=pred.scores,
        cluster_accuracy=cluster_accuracy,
        fcm=fcm_info,
    )
    return report, fold_model


def _check_fcm_data(y: np.ndarray, clusters_per_class: int) -> None:
    for label in (0, 1):
        count = int(np.sum(y == label))
        if count < clusters_per_class:
            raise InsufficientDataError(
                f"La clase {label} tiene {count} muestras; FCM-DNN requiere >= {clusters_per_class} por clase."
            )


def run_experiment(
    dataset: Dataset,
    config: ExperimentConfig,
    *,
    jobs: int = 1,
    audit: bool = True,
    ledger: SeedLedger | None = None,
) -> RunReport:
    """Ejecuta una corrida K-fold completa.

    Args:
      dataset: Dataset cargado o sintético (sin preprocesar).
      config: Configuración del experimento.
      jobs: Folds en paralelo (el resultado no depende de este valor).
      audit: Activa el registro de ids por etapa de ajuste.
      ledger: Ledger de semillas a reutilizar (por defecto uno nuevo desde master_seed).

    Returns:
      RunReport con un FoldReport por fold, agregados y modelos.

    Raises:
      InsufficientDataError: Si alguna clase no alcanza para clusterizar (FCM-DNN).
      InvalidFoldCountError: Si k > n.
      LeakageError: Si un id de test llega a un ajuste (modo por defecto).
    """
    started = time.perf_counter()
    ledger = ledger or SeedLedger(config.master_seed)
    warnings: list[str] = []
    log.info(
        "Inicio corrida | model=%s | k=%d | n=%d | master_seed=%d | jobs=%d | fit_before_split=%s",
        config.model.value, config.folds, dataset.n, ledger.master_seed, jobs, config.fit_before_split,
    )
    if config.folds not in STANDARD_FOLD_COUNTS:
        msg = f"non-paper fold count: k={config.folds} (estándar: {list(STANDARD_FOLD_COUNTS)})"
        log.warning(msg)
        warnings.append(msg)

    # * 1) Preprocesamiento (resize)
    resized = apply_pipeline(dataset, get_preprocess_pipeline(config.preprocess, with_normalize=False))
    X = resized.matrix()
    y = resized.labels()
    log.info("Preprocesamiento OK | n=%d | d=%d", X.shape[0], X.shape[1])
    if config.model == ModelKind.fcm_dnn:
        _check_fcm_data(y, config.clusters_per_class)

    # * 2) Partición
    plan = make_fold_plan(
        X.shape[0], config.folds, ledger.derive("partition"), y if config.stratify else None
    )
    log.info("Partición OK | k=%d | test=%s", plan.k, plan.test_sizes())

    ctx = _Context(
        config=config,
        X=X,
        y=y,
        plan=plan,
        ledger=ledger,
        audit=LeakageAudit(enabled=audit, strict=not config.fit_before_split),
    )
    if config.fit_before_split:
        all_ids = np.arange(X.shape[0])
        ctx.global_norm = _fit_normalization(X, all_ids, config.preprocess.normalization)
        if ctx.global_norm.stats is not None:
            ctx.audit.record(None, "normalize", all_ids)
        if config.model == ModelKind.fcm_dnn:
            ctx.global_clustering = _cluster(config, ctx.global_norm.apply(X), y, ledger.derive("fcm"))
            ctx.audit.record(None, "fcm", all_ids)
        log.warning("fit_before_split activo: normalización/clustering ven los datos de test.")

    # * 3) Folds
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda f: _run_fold(ctx, f), range(plan.k)))
    else:
        results = [_run_fold(ctx, f) for f in range(plan.k)]
    fold_reports = [r for r, _ in results]

    # * 4) Agregación
    pooled, mean = aggregate(
        [r.metrics for r in fold_reports],
        [(r.scores, r.actual) for r in fold_reports],
    )
    cluster_accuracy = None
    if config.model == ModelKind.fcm_dnn:
        correct = sum(r.cluster_accuracy * r.sizes["test"] for r in fold_reports)
        cluster_accuracy = correct / X.shape[0]

    duration = time.perf_counter() - started
    log.info(
        "Corrida OK | model=%s | k=%d | acc_pooled=%.4f | auc_pooled=%s | %.1fs",
        config.model.value, plan.k, pooled.acc,
        "nd" if pooled.auc is None else f"{pooled.auc:.4f}", duration,
    )
    return RunReport(
        model=config.model.value,
        k=plan.k,
        n=X.shape[0],
        folds=fold_reports,
        pooled=pooled,
        mean=mean,
        config=config.model_dump(mode="json"),
        seeds=ledger.to_dict(),
        duration_s=duration,
        warnings=warnings,
        audit=ctx.audit.summary(),
        cluster_accuracy=cluster_accuracy,
        plan=plan,
        models=[m for _, m in results],
    )


def _as_model(config: ExperimentConfig, kind: ModelKind) -> ExperimentConfig:
    """Fija el modelo; una red que sigue siendo el preset del modelo anterior pasa al preset de `kind`."""
    if config.model == kind:
        return config
    update: dict[str, Any] = {"model": kind}
    if config.network == network_preset(config.model):
        update["network"] = network_preset(kind)
    return config.model_copy(update=update)


def run_nn(dataset: Dataset, config: ExperimentConfig, **kwargs: Any) -> RunReport:
    """Corrida K-fold con la red NN (capas sigmoid, momentum)."""
    return run_experiment(dataset, _as_model(config, ModelKind.nn), **kwargs)


def run_dnn(dataset: Dataset, config: ExperimentConfig, **kwargs: Any) -> RunReport:
    """Corrida K-fold con la red DNN (maxout, tasa adaptativa, L1)."""
    return run_experiment(dataset, _as_model(config, ModelKind.dnn), **kwargs)


def run_fcm_dnn(dataset: Dataset, config: ExperimentConfig, **kwargs: Any) -> RunReport:
    """Corrida K-fold FCM-DNN: clusters por clase como targets de una cabeza softmax."""
    return run_experiment(dataset, _as_model(config, ModelKind.fcm_dnn), **kwargs)
