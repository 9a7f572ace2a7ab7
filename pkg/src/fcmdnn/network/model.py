"""Forward, backward y predicción de la red feed-forward.

Todas las operaciones trabajan por batch (filas = muestras); un vector de
entrada se trata como batch de una fila.

Pérdida total:
  L = mean(CE) + l1·Σ|W| + (l2/2)·ΣW²   (la regularización no toca los bias)

Con cabeza sigmoid o softmax + entropía cruzada, el delta de la capa de
salida es p − y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fcmdnn.errors import ShapeMismatchError
from fcmdnn.network.activations import batch_cross_entropy, maxout, sigmoid, softmax
from fcmdnn.network.params import LayerParams, NetworkParams


@dataclass(frozen=True)
class LayerTrace:
    """Lo que backward necesita de una capa.

    Attributes:
      inputs: Activaciones de entrada (batch × in).
      outputs: Activaciones de salida (batch × out).
      winners: Pieza ganadora por unidad (solo maxout).
    """

    inputs: np.ndarray
    outputs: np.ndarray
    winners: np.ndarray | None = None


@dataclass(frozen=True)
class Trace:
    layers: tuple[LayerTrace, ...]

    @property
    def output(self) -> np.ndarray:
        return self.layers[-1].outputs


def _as_batch(params: NetworkParams, x: np.ndarray) -> tuple[np.ndarray, bool]:
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != params.spec.input_width:
        raise ShapeMismatchError(
            f"Entrada de forma {np.asarray(x).shape}; la red espera ancho {params.spec.input_width}."
        )
    return X, single


def forward(params: NetworkParams, x: np.ndarray) -> tuple[np.ndarray, Trace]:
    """Propaga x por la red.

    Args:
      params: Parámetros de la red.
      x: Vector (d,) o matriz batch × d (sin escalar; el escalado se aplica aquí).

    Returns:
      (salida, trace): probabilidades (misma dimensionalidad que x) y trace
      suficiente para backward.

    Raises:
      ShapeMismatchError: Si el ancho de x no coincide con la primera capa.
    """
    X, single = _as_batch(params, x)
    A = params.scaler.apply(X)
    traces: list[LayerTrace] = []
    for layer, lp in zip(params.spec.layers, params.layers):
        Z = np.matmul(A, lp.W) + lp.b[:, None, :]
        winners = None
        if layer.activation == "maxout":
            out, winners = maxout(Z)
        elif layer.activation == "sigmoid":
            out = sigmoid(Z[0])
        elif layer.activation == "softmax":
            out = softmax(Z[0], axis=1)
        else:
            out = Z[0]
        traces.append(LayerTrace(inputs=A, outputs=out, winners=winners))
        A = out
    trace = Trace(layers=tuple(traces))
    return (A[0] if single else A), trace


def targets_matrix(params: NetworkParams, y: np.ndarray) -> np.ndarray:
    """Convierte etiquetas a la forma de la salida.

    - cabeza sigmoid: y (batch,) -> (batch, 1)
    - cabeza softmax: etiquetas enteras -> one-hot; una matriz se pasa tal cual
    """
    y = np.asarray(y, dtype=np.float64)
    width = params.spec.output_width
    if params.spec.is_binary:
        return y.reshape(-1, 1)
    if y.ndim == 2:
        if y.shape[1] != width:
            raise ShapeMismatchError(f"Targets con {y.shape[1]} columnas; la red tiene {width} salidas.")
        return y
    labels = y.astype(np.int64)
    if np.any(labels < 0) or np.any(labels >= width):
        raise ShapeMismatchError(f"Etiquetas fuera de [0, {width}).")
    Y = np.zeros((labels.size, width))
    Y[np.arange(labels.size), labels] = 1.0
    return Y


def regularization(params: NetworkParams) -> float:
    spec = params.spec
    total = 0.0
    for lp in params.layers:
        if spec.l1:
            total += spec.l1 * float(np.abs(lp.W).sum())
        if spec.l2:
            total += 0.5 * spec.l2 * float(np.square(lp.W).sum())
    return total


def loss(params: NetworkParams, x: np.ndarray, y: np.ndarray) -> float:
    """Entropía cruzada media + regularización sobre un batch."""
    P, _ = forward(params, np.atleast_2d(x))
    return batch_cross_entropy(P, targets_matrix(params, y)) + regularization(params)


def backward(params: NetworkParams, trace: Trace, target: np.ndarray) -> list[LayerParams]:
    """Gradiente exacto de la pérdida total respecto de W y b.

    Args:
      params: Los mismos parámetros usados en forward.
      trace: Trace producido por forward.
      target: Etiquetas (batch,) o matriz con la forma de la salida. Se aceptan
        targets suaves; el delta de salida sigue siendo p − y.

    Returns:
      Un LayerParams de gradientes por capa.

    Raises:
      ShapeMismatchError: Si el trace no corresponde a estos parámetros.
    """
    spec = params.spec
    if len(trace.layers) != len(params.layers):
        raise ShapeMismatchError("Trace obsoleto: cantidad de capas distinta.")
    P = trace.output
    Y = targets_matrix(params, target)
    if Y.shape != P.shape:
        raise ShapeMismatchError(f"Target {Y.shape} no coincide con la salida {P.shape}.")

    batch = P.shape[0]
    grads: list[LayerParams] = [lp.zeros_like() for lp in params.layers]
    dA = None
    for i in range(len(params.layers) - 1, -1, -1):
        layer, lp, lt = spec.layers[i], params.layers[i], trace.layers[i]
        if lt.inputs.shape[1] != lp.W.shape[1]:
            raise ShapeMismatchError(f"Trace obsoleto en la capa {i}.")
        if i == len(params.layers) - 1:
            dZ = ((P - Y) / batch)[None, ...]
        elif layer.activation == "maxout":
            pieces = np.arange(lp.W.shape[0])[:, None, None]
            dZ = (lt.winners[None, ...] == pieces) * dA[None, ...]
        elif layer.activation == "sigmoid":
            dZ = (dA * lt.outputs * (1.0 - lt.outputs))[None, ...]
        else:
            dZ = dA[None, ...]

        g = grads[i]
        g.W = np.matmul(lt.inputs.T[None, ...], dZ)
        g.b = dZ.sum(axis=1)
        if spec.l1:
            g.W += spec.l1 * np.sign(lp.W)
        if spec.l2:
            g.W += spec.l2 * lp.W
        if i > 0:
            dA = np.matmul(dZ, np.swapaxes(lp.W, 1, 2)).sum(axis=0)
    return grads


def label_from_scores(scores: np.ndarray) -> np.ndarray | int:
    """Etiqueta dura desde probabilidades.

    Una columna (o escalar): 1 si score >= 0.5. Varias: argmax con empate al
    índice menor.
    """
    S = np.asarray(scores, dtype=np.float64)
    single = S.ndim <= 1
    S2 = S.reshape(1, -1) if single else S
    if S2.shape[1] == 1:
        labels = (S2[:, 0] >= 0.5).astype(np.int64)
    else:
        labels = np.argmax(S2, axis=1)
    return int(labels[0]) if single else labels


def predict(params: NetworkParams, x: np.ndarray) -> tuple[np.ndarray, np.ndarray | int]:
    """Scores y etiqueta dura.

    Args:
      params: Red entrenada.
      x: Vector (d,) o matriz batch × d.

    Returns:
      (scores, etiqueta) con la dimensionalidad de x.
    """
    out, _ = forward(params, x)
    return out, label_from_scores(out)
