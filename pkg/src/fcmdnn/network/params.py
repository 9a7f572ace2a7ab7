"""Parámetros de la red: pesos por capa, escalado de entrada y acumuladores.

Cada capa guarda W con forma (piezas, entrada, salida) y b con forma
(piezas, salida). Las capas que no son maxout tienen una sola pieza.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from fcmdnn.network.spec import InputScaling, NetworkSpec


@dataclass
class LayerParams:
    """Pesos y bias de una capa (o gradientes/acumuladores con la misma forma)."""

    W: np.ndarray
    b: np.ndarray

    def copy(self) -> "LayerParams":
        return LayerParams(W=self.W.copy(), b=self.b.copy())

    def zeros_like(self) -> "LayerParams":
        return LayerParams(W=np.zeros_like(self.W), b=np.zeros_like(self.b))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.W)) and np.all(np.isfinite(self.b)))


@dataclass(frozen=True)
class InputScaler:
    """Transformación afín por atributo aplicada antes de la primera capa.

    x' = (x − shift) / scale. Con kind="none" no se guarda nada.
    """

    kind: InputScaling = "none"
    shift: np.ndarray | None = None
    scale: np.ndarray | None = None

    def apply(self, X: np.ndarray) -> np.ndarray:
        if self.kind == "none" or self.shift is None or self.scale is None:
            return X
        return (X - self.shift) / self.scale

    @classmethod
    def fit(cls, kind: InputScaling, X: np.ndarray) -> "InputScaler":
        """Ajusta el escalado sobre la matriz de entrenamiento.

        - range: [min, max] -> [−1, 1]
        - standardize: media 0, desvío 1
        Atributos constantes quedan con escala 1.
        """
        if kind == "none":
            return cls()
        X = np.asarray(X, dtype=np.float64)
        if kind == "range":
            lo, hi = X.min(axis=0), X.max(axis=0)
            shift = (lo + hi) / 2.0
            scale = (hi - lo) / 2.0
        else:
            shift = X.mean(axis=0)
            scale = X.std(axis=0)
        scale = np.where(scale > 0.0, scale, 1.0)
        return cls(kind=kind, shift=shift, scale=scale)


@dataclass
class NetworkParams:
    """Estado completo de una red.

    Attributes:
      spec: Topología y configuración de entrenamiento.
      layers: Un LayerParams por capa.
      scaler: Escalado de entrada ajustado en entrenamiento.
      optimizer_state: Acumuladores por nombre (velocity, o sq_grad/sq_update),
        cada uno con la misma forma que `layers`.
    """

    spec: NetworkSpec
    layers: list[LayerParams]
    scaler: InputScaler = field(default_factory=InputScaler)
    optimizer_state: dict[str, list[LayerParams]] = field(default_factory=dict)

    def copy(self) -> "NetworkParams":
        return NetworkParams(
            spec=self.spec,
            layers=[lp.copy() for lp in self.layers],
            scaler=self.scaler,
            optimizer_state={k: [lp.copy() for lp in v] for k, v in self.optimizer_state.items()},
        )

    def is_finite(self) -> bool:
        return all(lp.is_finite() for lp in self.layers)


def init_rngs(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Generadores independientes para inicialización y barajado."""
    init_ss, shuffle_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(init_ss), np.random.default_rng(shuffle_ss)


def init_params(spec: NetworkSpec, rng: np.random.Generator | None = None) -> NetworkParams:
    """Inicializa pesos uniformes en ±1/√fan_in y bias en cero.

    Args:
      spec: NetworkSpec validado.
      rng: Generador; por defecto se deriva de `spec.seed`.

    Returns:
      NetworkParams sin escalado ni acumuladores.
    """
    if rng is None:
        rng, _ = init_rngs(spec.seed)
    layers: list[LayerParams] = []
    for layer in spec.layers:
        bound = 1.0 / np.sqrt(layer.input_width)
        shape = (layer.n_pieces, layer.input_width, layer.output_width)
        layers.append(
            LayerParams(
                W=rng.uniform(-bound, bound, size=shape),
                b=np.zeros((layer.n_pieces, layer.output_width)),
            )
        )
    return NetworkParams(spec=spec, layers=layers)
