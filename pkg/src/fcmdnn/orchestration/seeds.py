"""Derivación de semillas desde la semilla maestra.

Esquema de contador: cada semilla es el primer word de
`SeedSequence([master_seed, código_de_propósito, fold + 1])` (fold = 0 para
semillas globales). Propósitos:

  - partition: permutación del FoldPlan
  - network: inicialización y barajado de la red de cada fold
  - fcm: inicialización del FCM de cada fold

Cada semilla usada queda registrada; un ledger reconstruido desde su
`to_dict()` devuelve exactamente las mismas semillas.
"""

from __future__ import annotations

import threading
from typing import Any

import numpy as np

PURPOSES = {"partition": 1, "network": 2, "fcm": 3}


def _key(purpose: str, fold: int | None) -> str:
    return purpose if fold is None else f"{purpose}/fold_{fold:02d}"


class SeedLedger:
    """Registro de todas las semillas derivadas en una corrida.

    Es seguro para folds en paralelo: las semillas dependen solo de la
    posición (propósito, fold), no del orden de las llamadas.
    """

    def __init__(self, master_seed: int, recorded: dict[str, int] | None = None) -> None:
        self.master_seed = int(master_seed)
        self._recorded: dict[str, int] = dict(recorded or {})
        self._lock = threading.Lock()

    def derive(self, purpose: str, fold: int | None = None) -> int:
        """Semilla para (propósito, fold); la registra si es nueva."""
        if purpose not in PURPOSES:
            raise ValueError(f"Propósito de semilla desconocido: {purpose}")
        key = _key(purpose, fold)
        with self._lock:
            if key not in self._recorded:
                entropy = [self.master_seed, PURPOSES[purpose], 0 if fold is None else fold + 1]
                self._recorded[key] = int(np.random.SeedSequence(entropy).generate_state(1)[0])
            return self._recorded[key]

    @property
    def seeds(self) -> dict[str, int]:
        with self._lock:
            return dict(sorted(self._recorded.items()))

    def to_dict(self) -> dict[str, Any]:
        return {"master_seed": self.master_seed, "seeds": self.seeds}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SeedLedger":
        return cls(int(data["master_seed"]), {k: int(v) for k, v in data.get("seeds", {}).items()})
