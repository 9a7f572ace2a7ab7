"""Configuración del experimento (modelos pydantic + presets de referencia).

Presets:
  - `nn_preset()`: red NN (2 capas ocultas 50 × 50, momentum 0.2, 20 ciclos).
  - `dnn_preset()`: red DNN (6 capas Maxout 50×40×30×20×15×10, tasa adaptativa
    rho=0.99 / epsilon=1e-8, L1=1e-5, 50 epochs).
  - `fcm_preset()`: FCM (fuzziness 2.0, 50 iteraciones, MinGain 1e-4).

Un archivo JSON de configuración se superpone al preset del modelo
(merge profundo). Claves desconocidas se rechazan.
"""

from __future__ import annotations

import json
from enum import Enum
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fcmdnn.errors import ConfigurationError
from fcmdnn.network.spec import (
    Adaptive,
    BatchSize,
    InputScaling,
    LayerSpec,
    MomentumSgd,
    NetworkSpec,
    OptimizerConfig,
)

STANDARD_FOLD_COUNTS = (5, 7, 10)


class ModelKind(str, Enum):
    """Modelos soportados."""

    nn = "nn"
    dnn = "dnn"
    fcm_dnn = "fcm_dnn"


class Normalization(str, Enum):
    """Transformación de intervalo a [0, 1]."""

    scale_by_255 = "scale_by_255"
    per_attribute_minmax = "per_attribute_minmax"


class PreprocessConfig(BaseModel):
    """Lado objetivo y normalización de las imágenes."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    target_side: int = Field(default=100, ge=1)
    normalization: Normalization = Normalization.scale_by_255


class FcmConfig(BaseModel):
    """Parámetros del FCM.

    Attributes:
      num_clusters: C (se reemplaza por clusters_per_class en el modo por clase).
      m: Fuzzifier (> 1).
      max_iterations: Tope de iteraciones.
      min_gain: Umbral de |J_t - J_{t-1}| para terminar.
      distance: Solo euclidean.
      seed: Semilla de inicialización/reseed.
      init: kmeans++ o random (ambas eligen C puntos distintos del dataset).
      joint: Clusteriza todas las muestras juntas (variante de comparación).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    num_clusters: int = Field(default=5, ge=2)
    m: float = Field(default=2.0, gt=1)
    max_iterations: int = Field(default=50, ge=1)
    min_gain: float = Field(default=1.0e-4, gt=0)
    distance: Literal["euclidean"] = "euclidean"
    seed: int = Field(default=0, ge=0)
    init: Literal["kmeans++", "random"] = "kmeans++"
    joint: bool = False


class NetworkConfig(BaseModel):
    """Plantilla de red sin anchos de entrada/salida.

    `build(input_width, n_outputs)` la resuelve a un `NetworkSpec` concreto:
    cabeza sigmoid si n_outputs == 1, softmax si no.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    hidden_widths: tuple[int, ...] = (50, 50)
    hidden_activation: Literal["maxout", "sigmoid", "linear"] = "sigmoid"
    pieces: int = Field(default=2, ge=2)
    l1: float = Field(default=0.0, ge=0)
    l2: float = Field(default=0.0, ge=0)
    optimizer: OptimizerConfig = Field(default_factory=MomentumSgd)
    epochs: int = Field(default=20, ge=0)
    batch_size: BatchSize = "full"
    shuffle: bool = True
    input_scaling: InputScaling = "none"

    def build(self, input_width: int, n_outputs: int = 1, *, seed: int = 0) -> NetworkSpec:
        """Resuelve la plantilla a un NetworkSpec.

        Args:
          input_width: Ancho de la entrada (píxeles).
          n_outputs: 1 para cabeza binaria sigmoid, C >= 2 para softmax.
          seed: Semilla de la red.

        Returns:
          NetworkSpec validado.
        """
        widths = [input_width, *self.hidden_widths]
        layers = [
            LayerSpec(
                input_width=w_in,
                output_width=w_out,
                activation=self.hidden_activation,
                pieces=self.pieces,
            )
            for w_in, w_out in zip(widths, widths[1:])
        ]
        layers.append(
            LayerSpec(
                input_width=widths[-1],
                output_width=n_outputs,
                activation="sigmoid" if n_outputs == 1 else "softmax",
            )
        )
        return NetworkSpec(
            layers=tuple(layers),
            l1=self.l1,
            l2=self.l2,
            optimizer=self.optimizer,
            epochs=self.epochs,
            batch_size=self.batch_size,
            shuffle=self.shuffle,
            input_scaling=self.input_scaling,
            seed=seed,
        )


def nn_preset() -> NetworkConfig:
    """Red NN: 2 capas sigmoid 50 × 50, momentum 0.2, 20 ciclos (tasa 0.01 por defecto)."""
    return NetworkConfig(
        hidden_widths=(50, 50),
        hidden_activation="sigmoid",
        optimizer=MomentumSgd(learning_rate=0.01, momentum=0.2),
        epochs=20,
        batch_size="auto",
        shuffle=True,
        input_scaling="range",
    )


def dnn_preset() -> NetworkConfig:
    """Red DNN: 6 capas maxout, tasa adaptativa, L1 = 1e-5, 50 epochs."""
    return NetworkConfig(
        hidden_widths=(50, 40, 30, 20, 15, 10),
        hidden_activation="maxout",
        pieces=2,
        l1=1.0e-5,
        l2=0.0,
        optimizer=Adaptive(rho=0.99, epsilon=1.0e-8),
        epochs=50,
        batch_size="auto",
        shuffle=True,
        input_scaling="standardize",
    )


def network_preset(model: "ModelKind | str") -> NetworkConfig:
    """Preset de red del modelo: NN para nn, DNN para dnn y fcm_dnn."""
    return nn_preset() if ModelKind(model) == ModelKind.nn else dnn_preset()


def fcm_preset() -> FcmConfig:
    """FCM: m = 2.0, 50 iteraciones, MinGain 1e-4."""
    return FcmConfig(num_clusters=5, m=2.0, max_iterations=50, min_gain=1.0e-4)


class ExperimentConfig(BaseModel):
    """Configuración completa de una corrida K-FCV.

    Attributes:
      model: nn, dnn o fcm_dnn.
      folds: K (5, 7 o 10; otros valores se aceptan con warning).
      preprocess: Redimensionado y normalización.
      fcm: Parámetros FCM (solo fcm_dnn).
      network: Plantilla de red.
      clusters_per_class: Clusters por clase para FCM-DNN.
      master_seed: Semilla maestra (deriva todas las demás).
      stratify: Folds estratificados por clase.
      fit_before_split: Normaliza y clusteriza todo el dataset antes de particionar.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    model: ModelKind = ModelKind.dnn
    folds: int = Field(default=10, ge=2)
    preprocess: PreprocessConfig = Field(default_factory=PreprocessConfig)
    fcm: FcmConfig = Field(default_factory=fcm_preset)
    network: NetworkConfig = Field(default_factory=dnn_preset)
    clusters_per_class: int = Field(default=5, ge=1)
    master_seed: int = Field(default=7, ge=0)
    stratify: bool = True
    fit_before_split: bool = False

    @model_validator(mode="before")
    @classmethod
    def _network_from_model(cls, data: Any) -> Any:
        if isinstance(data, dict) and "network" not in data:
            data = {**data, "network": network_preset(data.get("model", ModelKind.dnn))}
        return data

    @classmethod
    def for_model(cls, model: ModelKind | str, **overrides: Any) -> "ExperimentConfig":
        """Construye la config con el preset de red que corresponde al modelo.

        Sin `network` explícito, `ExperimentConfig(model=...)` elige el mismo preset.

        Args:
          model: Tipo de modelo.
          **overrides: Campos a sobrescribir (validados).

        Returns:
          ExperimentConfig validada.
        """
        kind = ModelKind(model)
        data: dict[str, Any] = {"model": kind, "network": network_preset(kind), "fcm": fcm_preset()}
        data.update(overrides)
        return cls.model_validate(data)


def deep_merge(base: dict[str, Any], overlay: dict[str, Any]) -> dict[str, Any]:
    """Merge recursivo: overlay gana; dicts anidados se combinan.

    Args:
      base: Diccionario base (no se modifica).
      overlay: Valores a superponer.

    Returns:
      Nuevo diccionario combinado.
    """
    out = dict(base)
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def load_experiment_config(
    path: str | Path | None,
    model: ModelKind | str,
    **overrides: Any,
) -> ExperimentConfig:
    """Carga un JSON de configuración sobre el preset del modelo.

    Args:
      path: Ruta al JSON (o None para usar solo el preset).
      model: Modelo, define el preset base.
      **overrides: Valores de flags del CLI (ganan sobre el archivo).

    Returns:
      ExperimentConfig validada.

    Raises:
      ConfigurationError: Si el archivo no existe o no es JSON válido.
      pydantic.ValidationError: Si algún valor viola un invariante.
    """
    base = ExperimentConfig.for_model(model).model_dump(mode="json")
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigurationError(f"No existe el archivo de configuración: {p}")
        try:
            overlay = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"Configuración JSON inválida en {p}: {exc}") from exc
        if not isinstance(overlay, dict):
            raise ConfigurationError(f"La configuración en {p} debe ser un objeto JSON.")
        overlay.pop("model", None)
        base = deep_merge(base, overlay)
    base = deep_merge(base, {k: v for k, v in overrides.items() if v is not None})
    base["model"] = ModelKind(model).value
    return ExperimentConfig.model_validate(base)
