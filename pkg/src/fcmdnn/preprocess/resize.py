"""Redimensionado bilineal con alineación por centro de píxel.

Para cada eje, la coordenada de origen de la salida j es:

  src = (j + 0.5) * in / out - 0.5      (recortada a [0, in - 1])

y se interpola entre floor(src) y floor(src) + 1. Es separable: primero
columnas, luego filas. Cada salida es una combinación convexa de entradas,
por lo que el rango [min, max] se conserva.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from fcmdnn.data.dataset import Sample
from fcmdnn.errors import InvalidDimensionError


def _axis_weights(n_in: int, n_out: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Índices inferiores/superiores y peso del superior para un eje."""
    src = (np.arange(n_out, dtype=np.float64) + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0.0, n_in - 1)
    lo = np.floor(src).astype(np.int64)
    hi = np.minimum(lo + 1, n_in - 1)
    return lo, hi, src - lo


def resize_image(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize bilineal de una matriz 2-D.

    Args:
      img: Matriz (alto, ancho).
      out_h: Alto destino.
      out_w: Ancho destino.

    Returns:
      Matriz (out_h, out_w) float64.
    """
    in_h, in_w = img.shape
    if (in_h, in_w) == (out_h, out_w):
        return img.astype(np.float64, copy=True)

    x0, x1, wx = _axis_weights(in_w, out_w)
    cols = img[:, x0] * (1.0 - wx) + img[:, x1] * wx

    y0, y1, wy = _axis_weights(in_h, out_h)
    wy = wy[:, None]
    return cols[y0, :] * (1.0 - wy) + cols[y1, :] * wy


def resize(sample: Sample, target_side: int) -> Sample:
    """Redimensiona una muestra a target_side × target_side.

    Args:
      sample: Muestra de entrada.
      target_side: Lado destino (>= 1).

    Returns:
      Nueva muestra con la misma identidad y etiquetas.

    Raises:
      InvalidDimensionError: Si la entrada tiene área cero o target_side < 1.
    """
    if sample.width <= 0 or sample.height <= 0 or sample.pixels.size == 0:
        raise InvalidDimensionError(f"Sample {sample.id}: área cero ({sample.width}x{sample.height}).")
    if target_side < 1:
        raise InvalidDimensionError(f"target_side={target_side} inválido.")

    img = sample.pixels.reshape(sample.height, sample.width)
    out = resize_image(img, target_side, target_side)
    return replace(sample, pixels=out.reshape(-1), width=target_side, height=target_side)
