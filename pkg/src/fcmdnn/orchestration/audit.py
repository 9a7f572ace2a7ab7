"""Auditoría de fuga por ids de muestra.

Cada camino de ajuste (estadísticas min-max, centros FCM, pesos de la red)
registra los ids de las muestras que tocó. `check(fold, test_ids)` verifica
que ningún id de test del fold aparezca en esos registros ni en los
registros globales (ajustes hechos antes de particionar).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Any, Iterable

from fcmdnn.errors import LeakageError
from fcmdnn.utils.logging import get_logger

log = get_logger(__name__)

GLOBAL = -1


@dataclass(frozen=True)
class LeakageViolation:
    fold: int
    stage: str
    ids: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"fold": self.fold, "stage": self.stage, "n_ids": len(self.ids), "ids": list(self.ids[:20])}


class LeakageAudit:
    """Registro de ids usados por cada etapa de ajuste.

    Args:
      enabled: Si False, no registra nada y `check` no hace nada.
      strict: Si True, `check` lanza LeakageError; si no, acumula violaciones.
    """

    def __init__(self, enabled: bool = True, strict: bool = True) -> None:
        self.enabled = enabled
        self.strict = strict
        self._fits: dict[int, dict[str, frozenset[int]]] = {}
        self._violations: list[LeakageViolation] = []
        self._lock = threading.Lock()

    def record(self, fold: int | None, stage: str, ids: Iterable[int]) -> None:
        """Registra que `stage` se ajustó con `ids` (fold=None para ajustes globales)."""
        if not self.enabled:
            return
        key = GLOBAL if fold is None else fold
        with self._lock:
            self._fits.setdefault(key, {})[stage] = frozenset(int(i) for i in ids)

    def stages(self, fold: int) -> dict[str, frozenset[int]]:
        with self._lock:
            out = dict(self._fits.get(GLOBAL, {}))
            out.update(self._fits.get(fold, {}))
            return out

    def check(self, fold: int, test_ids: Iterable[int]) -> list[LeakageViolation]:
        """Verifica que los ids de test no hayan llegado a ningún ajuste.

        Raises:
          LeakageError: En modo estricto, ante la primera violación.
        """
        if not self.enabled:
            return []
        test = frozenset(int(i) for i in test_ids)
        found: list[LeakageViolation] = []
        for stage, fitted in sorted(self.stages(fold).items()):
            leaked = test & fitted
            if leaked:
                found.append(LeakageViolation(fold=fold, stage=stage, ids=tuple(sorted(leaked))))
        if found:
            if self.strict:
                v = found[0]
                raise LeakageError(
                    f"Fuga en fold {fold}: {len(v.ids)} ids de test usados en '{v.stage}' (p.ej. {list(v.ids[:5])})."
                )
            log.warning("Fuga registrada | fold=%d | etapas=%s", fold, [v.stage for v in found])
            with self._lock:
                self._violations.extend(found)
        return found

    @property
    def violations(self) -> list[LeakageViolation]:
        with self._lock:
            return sorted(self._violations, key=lambda v: (v.fold, v.stage))

    def summary(self) -> dict[str, Any]:
        return {
            "enabled": self.enabled,
            "strict": self.strict,
            "violations": [v.to_dict() for v in self.violations],
        }
