"""Optimizadores: SGD con momentum y tasa adaptativa por peso.

momentum_sgd:
    v <- mu·v − eta·g ;  w <- w + v

adaptive (promedios decaídos de g² y Δ², sin tasa global):
    E[g²]  <- rho·E[g²] + (1 − rho)·g²
    Δ      <- −sqrt(E[Δ²] + eps) / sqrt(E[g²] + eps) · g
    E[Δ²]  <- rho·E[Δ²] + (1 − rho)·Δ²
    w      <- w + Δ
"""

from __future__ import annotations

import numpy as np

from fcmdnn.errors import ShapeMismatchError, TrainingDivergedError
from fcmdnn.network.params import LayerParams, NetworkParams
from fcmdnn.network.spec import Adaptive, MomentumSgd, OptimizerConfig

SLOTS = {
    "momentum_sgd": ("velocity",),
    "adaptive": ("sq_grad", "sq_update"),
}


def init_optimizer_state(params: NetworkParams, config: OptimizerConfig | None = None) -> dict[str, list[LayerParams]]:
    """Acumuladores en cero con la forma de cada capa."""
    config = config or params.spec.optimizer
    return {name: [lp.zeros_like() for lp in params.layers] for name in SLOTS[config.kind]}


def _check_shapes(params: NetworkParams, grads: list[LayerParams]) -> None:
    if len(grads) != len(params.layers):
        raise ShapeMismatchError("Cantidad de gradientes distinta a la cantidad de capas.")
    for i, (lp, g) in enumerate(zip(params.layers, grads)):
        if lp.W.shape != g.W.shape or lp.b.shape != g.b.shape:
            raise ShapeMismatchError(f"Gradiente de la capa {i} con forma incompatible.")


def _momentum(w: np.ndarray, g: np.ndarray, v: np.ndarray, cfg: MomentumSgd) -> None:
    v *= cfg.momentum
    v -= cfg.learning_rate * g
    w += v


def _adaptive(w: np.ndarray, g: np.ndarray, eg: np.ndarray, ed: np.ndarray, cfg: Adaptive) -> None:
    eg *= cfg.rho
    eg += (1.0 - cfg.rho) * g * g
    delta = -np.sqrt(ed + cfg.epsilon) / np.sqrt(eg + cfg.epsilon) * g
    ed *= cfg.rho
    ed += (1.0 - cfg.rho) * delta * delta
    w += delta


def optimizer_step(
    params: NetworkParams,
    grads: list[LayerParams],
    config: OptimizerConfig | None = None,
    *,
    in_place: bool = False,
) -> NetworkParams:
    """Aplica un paso del optimizador.

    Args:
      params: Parámetros actuales (con o sin acumuladores).
      grads: Gradientes con la misma forma que `params.layers`.
      config: Optimizador; por defecto el de `params.spec`.
      in_place: Si True modifica `params`; si no, trabaja sobre una copia.

    Returns:
      NetworkParams actualizados (pesos y acumuladores).

    Raises:
      TrainingDivergedError: Si algún gradiente no es finito.
      ShapeMismatchError: Si las formas no coinciden.
    """
    config = config or params.spec.optimizer
    _check_shapes(params, grads)
    if not all(g.is_finite() for g in grads):
        raise TrainingDivergedError("Gradiente no finito")

    out = params if in_place else params.copy()
    if set(out.optimizer_state) != set(SLOTS[config.kind]):
        out.optimizer_state = init_optimizer_state(out, config)
    state = out.optimizer_state

    for i, (lp, g) in enumerate(zip(out.layers, grads)):
        if isinstance(config, MomentumSgd):
            v = state["velocity"][i]
            _momentum(lp.W, g.W, v.W, config)
            _momentum(lp.b, g.b, v.b, config)
        else:
            eg, ed = state["sq_grad"][i], state["sq_update"][i]
            _adaptive(lp.W, g.W, eg.W, ed.W, config)
            _adaptive(lp.b, g.b, eg.b, ed.b, config)
    return out
