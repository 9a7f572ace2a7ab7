"""Jerarquía de errores del proyecto.

Cada error lleva un `exit_code` que el CLI usa como código de salida:
  - 2: errores de uso/validación (flags, configuración, dimensiones).
  - 1: errores de datos o de ejecución.
"""

from __future__ import annotations


class FcmDnnError(Exception):
    """Error base del proyecto."""

    exit_code: int = 1


# =========================
# Validación (exit 2)
# =========================

class ConfigurationError(FcmDnnError):
    """Configuración inválida o directorio de entrada inexistente."""

    exit_code = 2


class InvalidDimensionError(FcmDnnError):
    """Dimensiones de imagen inválidas (lado < mínimo, área cero)."""

    exit_code = 2


class InvalidFoldCountError(FcmDnnError):
    """Cantidad de folds fuera de [2, n]."""

    exit_code = 2


class ShapeMismatchError(FcmDnnError):
    """Formas de matrices/vectores incompatibles."""

    exit_code = 2


class DomainError(FcmDnnError):
    """Valor fuera del dominio de la operación (distancia negativa, target no one-hot)."""

    exit_code = 2


# =========================
# Ejecución (exit 1)
# =========================

class IngestionError(FcmDnnError):
    """Imagen ilegible o corrupta."""

    def __init__(self, path: str, cause: str) -> None:
        super().__init__(f"No se pudo leer la imagen '{path}': {cause}")
        self.path = path


class FoldPlanError(FcmDnnError):
    """Plan de folds inconsistente (cobertura, solapamiento o tamaño de validación)."""


class EmptyClassError(FcmDnnError):
    """Alguna clase quedó sin imágenes."""


class InsufficientDataError(FcmDnnError):
    """Menos muestras que clusters (o que folds) para operar."""


class TrainingDivergedError(FcmDnnError):
    """Pérdida o gradiente no finito durante el entrenamiento."""

    def __init__(self, message: str, epoch: int | None = None) -> None:
        super().__init__(message if epoch is None else f"{message} (epoch={epoch})")
        self.epoch = epoch


class UndefinedMetricError(FcmDnnError):
    """Métrica indefinida (p.ej. AUC con una sola clase)."""


class ModelFormatError(FcmDnnError):
    """Archivo de modelo corrupto o de versión incompatible."""


class LeakageError(FcmDnnError):
    """Un id de test llegó a un camino de ajuste (fit)."""
