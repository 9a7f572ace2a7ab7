"""Tipos de topología y optimizador de la red.

`LayerSpec` / `NetworkSpec` describen una red concreta (anchos ya resueltos);
`OptimizerConfig` es una unión discriminada por `kind`.
"""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

Activation = Literal["maxout", "sigmoid", "softmax", "linear"]
InputScaling = Literal["none", "range", "standardize"]
BatchSize = Union[Annotated[int, Field(ge=1)], Literal["full", "auto"]]


class MomentumSgd(BaseModel):
    """SGD con momentum: v <- mu*v - eta*g ; w <- w + v."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["momentum_sgd"] = "momentum_sgd"
    learning_rate: float = Field(default=0.01, gt=0)
    momentum: float = Field(default=0.2, ge=0, lt=1)


class Adaptive(BaseModel):
    """Tasa adaptativa por peso (promedios de g² y Δ² con decaimiento rho)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["adaptive"] = "adaptive"
    rho: float = Field(default=0.99, gt=0, lt=1)
    epsilon: float = Field(default=1.0e-8, gt=0)


OptimizerConfig = Annotated[Union[MomentumSgd, Adaptive], Field(discriminator="kind")]


class LayerSpec(BaseModel):
    """Una capa densa.

    Attributes:
      input_width: Ancho de entrada.
      output_width: Ancho de salida (unidades).
      activation: maxout, sigmoid, softmax o linear.
      pieces: Piezas afines por unidad (solo maxout).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    input_width: int = Field(ge=1)
    output_width: int = Field(ge=1)
    activation: Activation
    pieces: int = Field(default=2, ge=2)

    @property
    def n_pieces(self) -> int:
        """Piezas efectivas: `pieces` para maxout, 1 para el resto."""
        return self.pieces if self.activation == "maxout" else 1


class NetworkSpec(BaseModel):
    """Topología + entrenamiento de una red feed-forward.

    La última capa es sigmoid con 1 salida (binaria) o softmax con C salidas.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    layers: tuple[LayerSpec, ...]
    loss: Literal["cross_entropy"] = "cross_entropy"
    l1: float = Field(default=0.0, ge=0)
    l2: float = Field(default=0.0, ge=0)
    optimizer: OptimizerConfig = Field(default_factory=MomentumSgd)
    epochs: int = Field(default=20, ge=0)
    batch_size: BatchSize = "full"
    shuffle: bool = True
    input_scaling: InputScaling = "none"
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_chain(self) -> "NetworkSpec":
        if not self.layers:
            raise ValueError("La red necesita al menos una capa.")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.output_width != nxt.input_width:
                raise ValueError(
                    f"Anchos no encadenan: {prev.output_width} -> {nxt.input_width}"
                )
        for layer in self.layers[:-1]:
            if layer.activation == "softmax":
                raise ValueError("softmax solo se permite en la capa de salida.")
        head = self.layers[-1]
        if head.activation == "sigmoid" and head.output_width != 1:
            raise ValueError("Cabeza sigmoid debe tener 1 salida.")
        if head.activation == "softmax" and head.output_width < 2:
            raise ValueError("Cabeza softmax debe tener >= 2 salidas.")
        if head.activation not in ("sigmoid", "softmax"):
            raise ValueError("La capa de salida debe ser sigmoid o softmax.")
        return self

    @property
    def input_width(self) -> int:
        return self.layers[0].input_width

    @property
    def output_width(self) -> int:
        return self.layers[-1].output_width

    @property
    def is_binary(self) -> bool:
        return self.layers[-1].activation == "sigmoid"
