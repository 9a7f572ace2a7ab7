"""Modelo congelado de un fold: normalización + red + lectura binaria.

Lo usa el runner para predecir el test de cada fold y `evaluate` para
repetir esa predicción desde disco; ambos pasan por `FoldModel.predict`,
por eso las métricas coinciden bit a bit.

Lectura binaria:
  - cabeza binaria (sigmoid): score = salida; Sick si score >= 0.5.
  - cabeza de clusters (softmax): cluster = argmax; clase = clase del cluster;
    score Sick = suma de la masa softmax en clusters Sick.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal

import numpy as np

from fcmdnn.config import Normalization
from fcmdnn.data.dataset import SICK
from fcmdnn.errors import ModelFormatError, ShapeMismatchError
from fcmdnn.network.model import forward
from fcmdnn.network.params import NetworkParams
from fcmdnn.network.serialize import decode_array, encode_array, load_model, save_model
from fcmdnn.preprocess.normalize import MinMaxStats, scale_by_255


@dataclass(frozen=True, eq=False)
class NormalizationState:
    """Normalización ajustada (stats solo en modo per_attribute_minmax)."""

    mode: Normalization
    stats: MinMaxStats | None = None

    def apply(self, X: np.ndarray) -> np.ndarray:
        if self.mode == Normalization.scale_by_255:
            return scale_by_255(X)
        if self.stats is None:
            raise ModelFormatError("Normalización per_attribute_minmax sin estadísticas.")
        return self.stats.apply(np.asarray(X, dtype=np.float64))

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode.value,
            "lo": encode_array(self.stats.lo) if self.stats else None,
            "hi": encode_array(self.stats.hi) if self.stats else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "NormalizationState":
        mode = Normalization(data["mode"])
        lo, hi = decode_array(data.get("lo")), decode_array(data.get("hi"))
        stats = MinMaxStats(lo=lo, hi=hi) if lo is not None and hi is not None else None
        return cls(mode=mode, stats=stats)


@dataclass(frozen=True)
class HeadInfo:
    """Cómo convertir la salida de la red en una decisión binaria."""

    kind: Literal["binary", "cluster"] = "binary"
    cluster_classes: tuple[int, ...] = ()
    clusters_per_class: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "cluster_classes": list(self.cluster_classes),
            "clusters_per_class": self.clusters_per_class,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "HeadInfo":
        return cls(
            kind=data.get("kind", "binary"),
            cluster_classes=tuple(int(c) for c in data.get("cluster_classes", [])),
            clusters_per_class=data.get("clusters_per_class"),
        )


@dataclass(frozen=True)
class FoldPrediction:
    labels: np.ndarray
    scores: np.ndarray
    clusters: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class FoldModel:
    """Todo lo necesario para predecir con el modelo de un fold.

    Attributes:
      params: Red entrenada.
      normalization: Normalización ajustada en el fold.
      head: Lectura binaria de la salida.
      target_side: Lado al que se redimensionan las imágenes.
      fold: Índice del fold.
      test_ids: Ids de test del fold.
      model: nn, dnn o fcm_dnn.
    """

    params: NetworkParams
    normalization: NormalizationState
    head: HeadInfo
    target_side: int
    fold: int
    test_ids: tuple[int, ...]
    model: str

    def predict(self, X_raw: np.ndarray) -> FoldPrediction:
        """Predice desde píxeles sin normalizar (ya redimensionados)."""
        X = np.asarray(X_raw, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.params.spec.input_width:
            raise ShapeMismatchError(
                f"Entrada de forma {X.shape}; el modelo espera {self.params.spec.input_width} atributos."
            )
        P, _ = forward(self.params, self.normalization.apply(X))
        if self.head.kind == "binary":
            scores = P[:, 0]
            return FoldPrediction(labels=(scores >= 0.5).astype(np.int64), scores=scores)
        classes = np.asarray(self.head.cluster_classes, dtype=np.int64)
        clusters = np.argmax(P, axis=1)
        return FoldPrediction(
            labels=classes[clusters],
            scores=P[:, classes == SICK].sum(axis=1),
            clusters=clusters,
        )

    def to_extra(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "fold": self.fold,
            "target_side": self.target_side,
            "test_ids": list(self.test_ids),
            "normalization": self.normalization.to_dict(),
            "head": self.head.to_dict(),
        }

    def save(self, path: str | Path) -> Path:
        return save_model(path, self.params, self.to_extra())

    @classmethod
    def load(cls, path: str | Path) -> "FoldModel":
        """Lee un modelo de fold.

        Raises:
          ModelFormatError: Si el archivo es inválido o le falta metadata de fold.
        """
        params, extra = load_model(path)
        try:
            return cls(
                params=params,
                normalization=NormalizationState.from_dict(extra["normalization"]),
                head=HeadInfo.from_dict(extra["head"]),
                target_side=int(extra["target_side"]),
                fold=int(extra["fold"]),
                test_ids=tuple(int(i) for i in extra["test_ids"]),
                model=str(extra["model"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"Metadata de fold inválida en {path}: {exc}") from exc
