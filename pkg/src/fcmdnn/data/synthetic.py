"""Generador sintético que reemplaza al dataset CMRI privado.

Receta (versión `RECIPE_VERSION`):
  - Fondo de intensidad constante + ruido gaussiano aditivo.
  - Por clase, una elipse de intensidad elevada con centro, radios y brillo
    propios (Healthy más chica y tenue, Sick más brillante y rotada 90°).
  - Con `subpatterns > 1`, la elipse de cada muestra se desplaza a una de
    `subpatterns` posiciones sobre un anillo alrededor del centro de la
    clase (sub-patrones visibles para FCM).
  - Intensidades redondeadas a enteros y recortadas a [0, 255], así la
    escritura a PGM 8-bit es exacta.

Es función pura de (n_healthy, n_sick, side, seed, subpatterns).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fcmdnn.data.dataset import HEALTHY, SICK, Dataset, Provenance, Sample
from fcmdnn.errors import InvalidDimensionError

RECIPE_VERSION = 1
MIN_SIDE = 4


@dataclass(frozen=True)
class ClassRecipe:
    """Parámetros de la elipse de una clase (coordenadas normalizadas a [0, 1])."""

    center: tuple[float, float]
    radii: tuple[float, float]
    brightness: float
    ring_phase: float


RECIPES = {
    HEALTHY: ClassRecipe(center=(0.40, 0.40), radii=(0.16, 0.12), brightness=90.0, ring_phase=0.0),
    SICK: ClassRecipe(center=(0.60, 0.60), radii=(0.12, 0.18), brightness=160.0, ring_phase=0.5),
}
BACKGROUND = 40.0
NOISE_STD = 10.0
RING_RADIUS = 0.25
CENTER_JITTER = 0.015
BRIGHTNESS_JITTER = 6.0
EDGE_SHARPNESS = 8.0


def _render(
    recipe: ClassRecipe,
    pattern: int,
    subpatterns: int,
    side: int,
    rng: np.random.Generator,
) -> np.ndarray:
    coords = (np.arange(side) + 0.5) / side
    yy, xx = np.meshgrid(coords, coords, indexing="ij")

    cy, cx = recipe.center
    if subpatterns > 1:
        angle = 2.0 * np.pi * (pattern + recipe.ring_phase) / subpatterns
        cy += RING_RADIUS * np.sin(angle)
        cx += RING_RADIUS * np.cos(angle)
    cy += rng.normal(0.0, CENTER_JITTER)
    cx += rng.normal(0.0, CENTER_JITTER)
    ry, rx = recipe.radii

    r2 = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2
    mask = 1.0 / (1.0 + np.exp(EDGE_SHARPNESS * (r2 - 1.0)))
    brightness = recipe.brightness + rng.normal(0.0, BRIGHTNESS_JITTER)

    img = BACKGROUND + brightness * mask + rng.normal(0.0, NOISE_STD, size=(side, side))
    return np.clip(np.rint(img), 0.0, 255.0).reshape(-1)


def gen_synthetic(
    n_healthy: int,
    n_sick: int,
    side: int,
    seed: int,
    *,
    subpatterns: int = 1,
) -> Dataset:
    """Genera un dataset sintético determinista de dos clases.

    Args:
      n_healthy: Cantidad de imágenes sanas (>= 1).
      n_sick: Cantidad de imágenes enfermas (>= 1).
      side: Lado de la imagen cuadrada (>= 4).
      seed: Semilla del generador.
      subpatterns: Sub-patrones por clase (asignados round-robin).

    Returns:
      Dataset con provenance=synthetic; healthy primero, luego sick.

    Raises:
      InvalidDimensionError: Si side < 4.
      ValueError: Si algún conteo es < 1.
    """
    if side < MIN_SIDE:
        raise InvalidDimensionError(f"side={side} inválido; mínimo {MIN_SIDE}.")
    if n_healthy < 1 or n_sick < 1:
        raise ValueError(f"Se requiere al menos 1 imagen por clase (healthy={n_healthy}, sick={n_sick}).")
    if subpatterns < 1:
        raise ValueError(f"subpatterns={subpatterns} debe ser >= 1.")

    rng = np.random.default_rng(seed)
    samples: list[Sample] = []
    for label, count in ((HEALTHY, n_healthy), (SICK, n_sick)):
        recipe = RECIPES[label]
        for i in range(count):
            pattern = i % subpatterns
            samples.append(
                Sample(
                    id=len(samples),
                    pixels=_render(recipe, pattern, subpatterns, side, rng),
                    width=side,
                    height=side,
                    class_label=label,
                    pattern_id=pattern,
                )
            )

    return Dataset(
        samples=tuple(samples),
        provenance=Provenance.synthetic,
        generator_seed=seed,
        meta={"recipe_version": RECIPE_VERSION, "side": side, "subpatterns": subpatterns},
    )
