"""Normalización de intensidades a [0, 1] ("interval transformation").

Modos:
  - scale_by_255: x / 255. No depende del split.
  - per_attribute_minmax: (x - min) / (max - min) por posición de píxel;
    atributos constantes -> 0. Las estadísticas se pueden ajustar sobre un
    subconjunto (folds de entrenamiento) y aplicarse a todo el dataset;
    los valores fuera del rango ajustado se recortan a [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fcmdnn.config import Normalization, PreprocessConfig
from fcmdnn.data.dataset import Dataset
from fcmdnn.errors import ShapeMismatchError
from fcmdnn.utils.logging import get_logger

log = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class MinMaxStats:
    """Mínimos y máximos por atributo (posición de píxel)."""

    lo: np.ndarray
    hi: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Aplica el mapa afín por atributo y recorta a [0, 1]."""
        if X.shape[1] != self.lo.size:
            raise ShapeMismatchError(f"Se esperaban {self.lo.size} atributos, llegaron {X.shape[1]}.")
        span = self.hi - self.lo
        constant = span == 0
        safe = np.where(constant, 1.0, span)
        out = (X - self.lo) / safe
        out[:, constant] = 0.0
        return np.clip(out, 0.0, 1.0)


def fit_minmax(X: np.ndarray) -> MinMaxStats:
    """Ajusta min/max por columna.

    Args:
      X: Matriz n × d (n >= 1).
    """
    if X.ndim != 2 or X.shape[0] == 0:
        raise ShapeMismatchError(f"fit_minmax requiere matriz n × d no vacía; forma={X.shape}.")
    stats = MinMaxStats(lo=X.min(axis=0), hi=X.max(axis=0))
    n_const = int(np.sum(stats.hi == stats.lo))
    if n_const:
        log.debug("min-max: %d atributos constantes -> 0", n_const)
    return stats


def scale_by_255(X: np.ndarray) -> np.ndarray:
    return np.asarray(X, dtype=np.float64) / 255.0


def normalize(
    dataset: Dataset,
    config: PreprocessConfig,
    *,
    stats: MinMaxStats | None = None,
) -> Dataset:
    """Normaliza todas las intensidades del dataset a [0, 1].

    Args:
      dataset: Dataset con dimensiones homogéneas (llamar después de resize).
      config: Modo de normalización.
      stats: Estadísticas min-max ya ajustadas (si None, se ajustan sobre
        el propio dataset).

    Returns:
      Nuevo Dataset normalizado.

    Raises:
      ShapeMismatchError: Si hay dimensiones mixtas.
    """
    shapes = dataset.shapes()
    if len(shapes) > 1:
        raise ShapeMismatchError(f"Dimensiones mixtas: {sorted(shapes)}; aplica resize primero.")
    if not dataset.samples:
        return dataset
    (width, height), = shapes
    X = dataset.matrix()

    if config.normalization == Normalization.scale_by_255:
        out = scale_by_255(X)
    else:
        out = (stats or fit_minmax(X)).apply(X)
    return dataset.with_pixels(out, width, height)
