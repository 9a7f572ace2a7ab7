"""Activaciones y pérdida de la red."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from fcmdnn.errors import DomainError, ShapeMismatchError

PROB_EPS = 1.0e-12


def sigmoid(s):
    """Sigmoide estable: separa por signo para no desbordar exp.

    Args:
      s: Escalar o arreglo finito.

    Returns:
      Valores en (0, 1) con la misma forma (float si la entrada es escalar).
    """
    arr = np.asarray(s, dtype=np.float64)
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    e = np.exp(arr[~pos])
    out[~pos] = e / (1.0 + e)
    if out.ndim == 0:
        return float(out)
    return out


def softmax(z: np.ndarray, axis: int = -1) -> np.ndarray:
    """Softmax con corrimiento por el máximo."""
    z = np.asarray(z, dtype=np.float64)
    shifted = z - z.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def maxout(responses: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Máximo sobre el eje de piezas.

    Args:
      responses: Respuestas afines apiladas (piezas, ..., unidades).

    Returns:
      (salida, índice de la pieza ganadora); empates van a la pieza menor.
    """
    idx = np.argmax(responses, axis=0)
    out = np.take_along_axis(responses, idx[None, ...], axis=0)[0]
    return out, idx


def maxout_forward(x: np.ndarray, pieces: Sequence[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    """Unidad maxout sobre un vector de entrada.

    Args:
      x: Entrada (d,).
      pieces: Lista de (pesos d × u, bias u), una por pieza.

    Returns:
      Vector (u,) con el máximo elemento a elemento de las respuestas afines.

    Raises:
      ShapeMismatchError: Si hay menos de 2 piezas o formas distintas.
    """
    if len(pieces) < 2:
        raise ShapeMismatchError(f"maxout requiere >= 2 piezas; llegaron {len(pieces)}.")
    x = np.asarray(x, dtype=np.float64)
    W0, b0 = (np.asarray(a, dtype=np.float64) for a in pieces[0])
    responses = []
    for W, b in pieces:
        W = np.asarray(W, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if W.shape != W0.shape or b.shape != b0.shape:
            raise ShapeMismatchError("Todas las piezas maxout deben tener la misma forma.")
        if W.ndim != 2 or W.shape[0] != x.shape[0] or b.shape != (W.shape[1],):
            raise ShapeMismatchError(
                f"Pieza de forma {W.shape}/{b.shape} incompatible con entrada de ancho {x.shape[0]}."
            )
        responses.append(x @ W + b)
    out, _ = maxout(np.stack(responses))
    return out


def _check_binary_target(y: np.ndarray) -> None:
    if not np.all((y == 0.0) | (y == 1.0)):
        raise DomainError("El target binario debe ser 0 o 1.")


def cross_entropy(predicted, target) -> float:
    """Entropía cruzada de una muestra.

    Forma binaria: `predicted` es la probabilidad escalar de la clase 1 y
    `target` es 0 o 1. Forma multiclase: vectores sobre el simplex y one-hot.
    Las probabilidades se recortan a [1e-12, 1 − 1e-12] antes del log.

    Raises:
      DomainError: Si el target no es one-hot o las probabilidades salen de [0, 1].
      ShapeMismatchError: Si las formas no coinciden.
    """
    p = np.asarray(predicted, dtype=np.float64)
    y = np.asarray(target, dtype=np.float64)
    if np.any(p < 0.0) or np.any(p > 1.0) or not np.all(np.isfinite(p)):
        raise DomainError("Las probabilidades deben estar en [0, 1].")
    p = np.clip(p, PROB_EPS, 1.0 - PROB_EPS)

    if p.ndim == 0 or (p.size == 1 and y.size == 1):
        _check_binary_target(y)
        pv, yv = float(p.reshape(())), float(y.reshape(()))
        return float(-(yv * np.log(pv) + (1.0 - yv) * np.log(1.0 - pv)))

    if p.shape != y.shape:
        raise ShapeMismatchError(f"predicted {p.shape} != target {y.shape}.")
    _check_binary_target(y)
    if y.sum() != 1.0:
        raise DomainError("El target multiclase debe ser one-hot.")
    return float(-np.sum(y * np.log(p)))


def batch_cross_entropy(P: np.ndarray, Y: np.ndarray) -> float:
    """Entropía cruzada media sobre un batch (filas = muestras).

    Con una sola columna se usa la forma binaria; con varias, la multiclase.
    No valida one-hot (se usa en el loop de entrenamiento).
    """
    P = np.clip(P, PROB_EPS, 1.0 - PROB_EPS)
    if P.shape[1] == 1:
        per = -(Y * np.log(P) + (1.0 - Y) * np.log(1.0 - P)).sum(axis=1)
    else:
        per = -(Y * np.log(P)).sum(axis=1)
    return float(per.mean())
