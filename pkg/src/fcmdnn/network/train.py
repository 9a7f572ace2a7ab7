"""Loop de entrenamiento.

- Pesos iniciales y orden de barajado salen de `spec.seed` (generadores
  independientes), así la trayectoria completa es determinista.
- batch_size: "full" = un paso por epoch; "auto" = un paso por muestra;
  entero = mini-batches de ese tamaño.
- Se corren todas las epochs (sin early stopping); la pérdida de
  validación solo se registra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from fcmdnn.errors import InsufficientDataError, ShapeMismatchError, TrainingDivergedError
from fcmdnn.network.model import backward, forward, loss, targets_matrix
from fcmdnn.network.optim import init_optimizer_state, optimizer_step
from fcmdnn.network.params import InputScaler, NetworkParams, init_params, init_rngs
from fcmdnn.network.spec import NetworkSpec
from fcmdnn.utils.logging import get_logger

log = get_logger(__name__)

DataSplit = tuple[np.ndarray, np.ndarray]
EpochCallback = Callable[[int, NetworkParams], None]


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    validation_loss: float | None


@dataclass
class TrainingHistory:
    """Pérdidas por epoch (vacío si epochs == 0)."""

    records: list[EpochRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def train_loss(self) -> list[float]:
        return [r.train_loss for r in self.records]

    @property
    def validation_loss(self) -> list[float | None]:
        return [r.validation_loss for r in self.records]

    def to_dict(self) -> dict[str, Any]:
        return {"train_loss": self.train_loss, "validation_loss": self.validation_loss}


def _batch_length(spec: NetworkSpec, n: int) -> int:
    if spec.batch_size == "full":
        return n
    if spec.batch_size == "auto":
        return 1
    return min(int(spec.batch_size), n)


def _check_split(name: str, spec: NetworkSpec, split: DataSplit) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(split[0], dtype=np.float64)
    y = np.asarray(split[1])
    if X.ndim != 2 or X.shape[1] != spec.input_width:
        raise ShapeMismatchError(f"{name}: forma {X.shape}; la red espera ancho {spec.input_width}.")
    if y.shape[0] != X.shape[0]:
        raise ShapeMismatchError(f"{name}: {X.shape[0]} muestras y {y.shape[0]} targets.")
    return X, y


def train(
    spec: NetworkSpec,
    train_set: DataSplit,
    validation_set: DataSplit | None = None,
    *,
    on_epoch: EpochCallback | None = None,
) -> tuple[NetworkParams, TrainingHistory]:
    """Entrena una red desde cero.

    Args:
      spec: Topología y configuración de entrenamiento.
      train_set: (X, y) de entrenamiento; y son etiquetas (o una matriz con la forma de la salida).
      validation_set: (X, y) de validación, opcional.
      on_epoch: Callback(epoch, params) al final de cada epoch.

    Returns:
      (params de la última epoch, historial).

    Raises:
      InsufficientDataError: Si el set de entrenamiento está vacío.
      ShapeMismatchError: Si los anchos no coinciden con la red.
      TrainingDivergedError: Si la pérdida o un gradiente dejan de ser finitos.
    """
    X, y = _check_split("train", spec, train_set)
    if X.shape[0] == 0:
        raise InsufficientDataError("El set de entrenamiento está vacío.")
    val = _check_split("validation", spec, validation_set) if validation_set is not None else None
    if val is not None and val[0].shape[0] == 0:
        val = None

    init_rng, shuffle_rng = init_rngs(spec.seed)
    params = init_params(spec, init_rng)
    params.scaler = InputScaler.fit(spec.input_scaling, X)
    params.optimizer_state = init_optimizer_state(params)
    history = TrainingHistory()
    if spec.epochs == 0:
        return params, history

    Y = targets_matrix(params, y)
    n = X.shape[0]
    step = _batch_length(spec, n)
    log.debug(
        "Entrenamiento | n=%d | capas=%d | epochs=%d | batch=%d | opt=%s",
        n, len(spec.layers), spec.epochs, step, spec.optimizer.kind,
    )

    for epoch in range(1, spec.epochs + 1):
        order = shuffle_rng.permutation(n) if spec.shuffle else np.arange(n)
        for start in range(0, n, step):
            idx = order[start:start + step]
            _, trace = forward(params, X[idx])
            grads = backward(params, trace, Y[idx])
            try:
                optimizer_step(params, grads, in_place=True)
            except TrainingDivergedError as exc:
                raise TrainingDivergedError(str(exc), epoch=epoch) from exc

        train_loss = loss(params, X, Y)
        val_loss = loss(params, val[0], targets_matrix(params, val[1])) if val is not None else None
        if not np.isfinite(train_loss) or (val_loss is not None and not np.isfinite(val_loss)):
            raise TrainingDivergedError("Pérdida no finita", epoch=epoch)
        history.records.append(EpochRecord(epoch, train_loss, val_loss))
        log.debug("Epoch %d/%d | train=%.6f | val=%s", epoch, spec.epochs, train_loss, val_loss)
        if on_epoch is not None:
            on_epoch(epoch, params)

    return params, history
