"""Pipeline de preprocesamiento como lista de steps.

Cada step es una función Dataset -> Dataset; `apply_pipeline` los aplica en
orden. `get_preprocess_pipeline(config)` arma el pipeline estándar
(resize + normalize).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

from fcmdnn.config import PreprocessConfig
from fcmdnn.data.dataset import Dataset
from fcmdnn.preprocess.normalize import MinMaxStats, normalize
from fcmdnn.preprocess.resize import resize
from fcmdnn.utils.logging import get_logger

log = get_logger(__name__)

PreprocessFn = Callable[[Dataset], Dataset]


@dataclass(frozen=True)
class PreprocessPipeline:
    """Pipeline de steps sobre un Dataset.

    Attributes:
        steps: Funciones Dataset -> Dataset, en orden.
    """

    steps: list[PreprocessFn]


def apply_pipeline(dataset: Dataset, pipeline: PreprocessPipeline) -> Dataset:
    """Aplica los steps en orden."""
    out = dataset
    for step in pipeline.steps:
        out = step(out)
    return out


def step_resize(target_side: int) -> PreprocessFn:
    """Crea un step que redimensiona todas las muestras.

    Args:
      target_side (int): Lado destino.

    Returns:
      (PreprocessFn): Step.
    """

    def _fn(ds: Dataset) -> Dataset:
        resized = tuple(resize(s, target_side) for s in ds.samples)
        log.debug("Resize OK | n=%d | side=%d", len(resized), target_side)
        return replace(ds, samples=resized)

    return _fn


def step_normalize(config: PreprocessConfig, stats: MinMaxStats | None = None) -> PreprocessFn:
    """Crea un step que normaliza a [0, 1].

    Args:
      config (PreprocessConfig): Modo de normalización.
      stats (MinMaxStats | None): Estadísticas ya ajustadas (modo per_attribute).

    Returns:
      (PreprocessFn): Step.
    """

    def _fn(ds: Dataset) -> Dataset:
        return normalize(ds, config, stats=stats)

    return _fn


def get_preprocess_pipeline(config: PreprocessConfig, *, with_normalize: bool = True) -> PreprocessPipeline:
    """Pipeline estándar: redimensionado seguido de normalización.

    Args:
      config: Configuración de preprocesamiento.
      with_normalize: Si False, solo resize (la normalización se ajusta por fold).

    Returns:
      PreprocessPipeline listo para `apply_pipeline`.
    """
    steps: list[PreprocessFn] = [step_resize(config.target_side)]
    if with_normalize:
        steps.append(step_normalize(config))
    return PreprocessPipeline(steps=steps)


def preprocess(dataset: Dataset, config: PreprocessConfig) -> Dataset:
    """Resize + normalize sobre todo el dataset."""
    return apply_pipeline(dataset, get_preprocess_pipeline(config))
