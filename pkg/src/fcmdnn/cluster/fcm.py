"""Fuzzy C-means por minimización alternada del objetivo

    J_m(U, V) = Σ_i Σ_k u_ik^m ‖x_k − v_i‖²

Actualizaciones (consistentes con J_m, por eso J no crece entre iteraciones):
  - membresías: u_ik = 1 / Σ_j (d_ik / d_jk)^(2/(m−1)); si una muestra está a
    distancia 0 de uno o más centros, su membresía se reparte en partes
    iguales entre esos centros.
  - centros: v_i = Σ_k u_ik^m x_k / Σ_k u_ik^m; un cluster sin masa se
    re-siembra en un punto del dataset elegido con la semilla.

Terminación: max_iterations o |J_t − J_{t−1}| < min_gain.

U se guarda como matriz n × c (una fila por muestra).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from fcmdnn.config import FcmConfig
from fcmdnn.data.dataset import HEALTHY, SICK, Dataset
from fcmdnn.errors import DomainError, InsufficientDataError, ShapeMismatchError
from fcmdnn.utils.logging import get_logger

log = get_logger(__name__)

IterationCallback = Callable[[int, np.ndarray, np.ndarray, float], None]


# =========================
# Operaciones elementales
# =========================

def _check_2d(name: str, A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ShapeMismatchError(f"{name} debe ser una matriz 2-D; forma={A.shape}.")
    return A


def distances(X: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Distancias euclidianas muestra-centro.

    Args:
      X: Datos n × d.
      V: Centros c × d.

    Returns:
      Matriz n × c con ‖x_k − v_i‖.

    Raises:
      ShapeMismatchError: Si d no coincide.
    """
    X = _check_2d("X", X)
    V = _check_2d("V", V)
    if X.shape[1] != V.shape[1]:
        raise ShapeMismatchError(f"Dimensión de X ({X.shape[1]}) != dimensión de V ({V.shape[1]}).")
    D = np.empty((X.shape[0], V.shape[0]))
    # un centro a la vez: memoria n × d y orden de suma fijo
    for i in range(V.shape[0]):
        diff = X - V[i]
        D[:, i] = np.sqrt(np.einsum("kd,kd->k", diff, diff))
    return D


def update_memberships(D: np.ndarray, m: float) -> np.ndarray:
    """Membresías óptimas para distancias dadas.

    Args:
      D: Distancias n × c (no negativas).
      m: Fuzzifier (> 1).

    Returns:
      Matriz n × c fila-estocástica.

    Raises:
      DomainError: Si hay distancias negativas o no finitas, o m <= 1.
    """
    D = _check_2d("D", D)
    if m <= 1:
        raise DomainError(f"m={m} debe ser > 1.")
    if not np.all(np.isfinite(D)) or np.any(D < 0):
        raise DomainError("Las distancias deben ser finitas y no negativas.")

    n, c = D.shape
    U = np.empty((n, c))
    zero = D == 0.0
    has_zero = zero.any(axis=1)

    if has_zero.any():
        z = zero[has_zero].astype(np.float64)
        U[has_zero] = z / z.sum(axis=1, keepdims=True)

    rest = ~has_zero
    if rest.any():
        # u_ik ∝ d_ik^(−p) con p = 2/(m−1); en log para que m -> 1⁺ no desborde
        p = 2.0 / (m - 1.0)
        logits = -p * np.log(D[rest])
        logits -= logits.max(axis=1, keepdims=True)
        w = np.exp(logits)
        U[rest] = w / w.sum(axis=1, keepdims=True)
    return U


def _update_centers(
    X: np.ndarray,
    U: np.ndarray,
    m: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, list[int]]:
    W = U ** m
    mass = W.sum(axis=0)
    empty = [int(i) for i in np.flatnonzero(mass <= 0.0)]
    safe = np.where(mass > 0.0, mass, 1.0)
    V = (W.T @ X) / safe[:, None]
    for i in empty:
        V[i] = X[int(rng.integers(X.shape[0]))]
    return V, empty


def update_centers(
    X: np.ndarray,
    U: np.ndarray,
    m: float,
    *,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Centros como medias ponderadas por u^m.

    Args:
      X: Datos n × d.
      U: Membresías n × c.
      m: Fuzzifier.
      rng: Generador para re-sembrar clusters sin masa.

    Returns:
      Centros c × d.

    Raises:
      ShapeMismatchError: Si X y U no tienen la misma cantidad de filas.
    """
    X = _check_2d("X", X)
    U = _check_2d("U", U)
    if X.shape[0] != U.shape[0]:
        raise ShapeMismatchError(f"X tiene {X.shape[0]} filas y U {U.shape[0]}.")
    V, _ = _update_centers(X, U, m, rng if rng is not None else np.random.default_rng(0))
    return V


def objective(X: np.ndarray, U: np.ndarray, V: np.ndarray, m: float) -> float:
    """J_m(U, V) = Σ u_ik^m ‖x_k − v_i‖² (no negativo)."""
    U = _check_2d("U", U)
    D = distances(X, V)
    if D.shape != U.shape:
        raise ShapeMismatchError(f"U tiene forma {U.shape}, se esperaba {D.shape}.")
    return float(np.sum((U ** m) * D ** 2))


def intra_cluster_distance(X: np.ndarray, U: np.ndarray, V: np.ndarray) -> float:
    """Suma difusa de distancias intra-cluster Σ u_ik ‖x_k − v_i‖ (variante de reporte)."""
    U = _check_2d("U", U)
    D = distances(X, V)
    if D.shape != U.shape:
        raise ShapeMismatchError(f"U tiene forma {U.shape}, se esperaba {D.shape}.")
    return float(np.sum(U * D))


# =========================
# Corrida completa
# =========================

@dataclass(frozen=True, eq=False)
class FcmState:
    """Estado final de una corrida FCM.

    Attributes:
      memberships: U, n × c.
      centers: V, c × d.
      objective_history: J después de la inicialización y de cada iteración.
      iterations_run: Iteraciones de actualización ejecutadas.
      converged: True si terminó por min_gain.
      reseeded: (iteración, cluster) re-sembrados por falta de masa.
    """

    memberships: np.ndarray
    centers: np.ndarray
    objective_history: tuple[float, ...]
    iterations_run: int
    converged: bool
    reseeded: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    @property
    def labels(self) -> np.ndarray:
        """Cluster por argmax de membresía (empates al índice menor)."""
        return np.argmax(self.memberships, axis=1)

    @property
    def final_objective(self) -> float:
        return self.objective_history[-1]

    def predict(self, X: np.ndarray, m: float) -> np.ndarray:
        """Asigna nuevas muestras al cluster de mayor membresía."""
        return np.argmax(update_memberships(distances(X, self.centers), m), axis=1)

    def to_dict(self) -> dict[str, Any]:
        return {
            "centers": self.centers.tolist(),
            "memberships": self.memberships.tolist(),
            "objective_history": list(self.objective_history),
            "iterations_run": self.iterations_run,
            "converged": self.converged,
            "reseeded": [list(r) for r in self.reseeded],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FcmState":
        return cls(
            memberships=np.asarray(data["memberships"], dtype=np.float64),
            centers=np.asarray(data["centers"], dtype=np.float64),
            objective_history=tuple(float(j) for j in data["objective_history"]),
            iterations_run=int(data["iterations_run"]),
            converged=bool(data["converged"]),
            reseeded=tuple((int(a), int(b)) for a, b in data.get("reseeded", [])),
        )


def init_centers(X: np.ndarray, c: int, rng: np.random.Generator, method: str = "kmeans++") -> np.ndarray:
    """Elige c puntos distintos del dataset como centros iniciales.

    Args:
      X: Datos n × d.
      c: Cantidad de centros.
      rng: Generador con semilla.
      method: "random" (uniforme sin reemplazo) o "kmeans++" (ponderado por D²).

    Returns:
      Centros c × d (copias de filas de X).
    """
    n = X.shape[0]
    if method == "random":
        idx = rng.choice(n, size=c, replace=False)
        return X[np.sort(idx)].copy()

    chosen = [int(rng.integers(n))]
    d2 = np.einsum("kd,kd->k", X - X[chosen[0]], X - X[chosen[0]])
    while len(chosen) < c:
        weights = d2.copy()
        weights[chosen] = 0.0
        total = weights.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=weights / total))
        else:
            free = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(free))
        chosen.append(nxt)
        diff = X - X[nxt]
        d2 = np.minimum(d2, np.einsum("kd,kd->k", diff, diff))
    return X[chosen].copy()


def run_fcm(
    X: np.ndarray,
    config: FcmConfig,
    *,
    initial_centers: np.ndarray | None = None,
    callback: IterationCallback | None = None,
) -> FcmState:
    """Corre FCM hasta converger o agotar iteraciones.

    Args:
      X: Datos n × d.
      config: Parámetros (c, m, iteraciones, min_gain, semilla).
      initial_centers: Centros iniciales explícitos (c × d) o None.
      callback: Se llama como callback(iteración, U, V, J) tras cada paso.

    Returns:
      FcmState con U y V consistentes (U óptima para V).

    Raises:
      InsufficientDataError: Si n < c.
      ShapeMismatchError: Si initial_centers no es c × d.
    """
    X = _check_2d("X", X)
    n, d = X.shape
    c, m = config.num_clusters, config.m
    if n < c:
        raise InsufficientDataError(f"FCM requiere n >= c (n={n}, c={c}).")

    rng = np.random.default_rng(config.seed)
    if initial_centers is not None:
        V = _check_2d("initial_centers", initial_centers).copy()
        if V.shape != (c, d):
            raise ShapeMismatchError(f"initial_centers tiene forma {V.shape}, se esperaba {(c, d)}.")
    else:
        V = init_centers(X, c, rng, config.init)

    U = update_memberships(distances(X, V), m)
    J = objective(X, U, V, m)
    history = [J]
    reseeded: list[tuple[int, int]] = []
    converged = False
    iterations = 0
    if callback is not None:
        callback(0, U, V, J)

    for it in range(1, config.max_iterations + 1):
        V, empty = _update_centers(X, U, m, rng)
        if empty:
            log.warning("FCM: clusters sin masa re-sembrados | iter=%d | clusters=%s", it, empty)
            reseeded.extend((it, i) for i in empty)
        U = update_memberships(distances(X, V), m)
        J_new = objective(X, U, V, m)
        history.append(J_new)
        iterations = it
        if callback is not None:
            callback(it, U, V, J_new)
        if abs(J - J_new) < config.min_gain:
            converged = True
            break
        J = J_new

    log.debug(
        "FCM fin | n=%d | c=%d | iters=%d | converged=%s | J=%.6g",
        n, c, iterations, converged, history[-1],
    )
    return FcmState(
        memberships=U,
        centers=V,
        objective_history=tuple(history),
        iterations_run=iterations,
        converged=converged,
        reseeded=tuple(reseeded),
    )


# =========================
# Clustering por clase
# =========================

def _class_seed(seed: int, label: int) -> int:
    return int(np.random.SeedSequence([seed, label]).generate_state(1)[0])


@dataclass(frozen=True, eq=False)
class PerClassClustering:
    """Resultado del clustering de cada clase por separado.

    Cluster global = cluster local + offset, con offset 0 para Healthy y
    `clusters_per_class` para Sick.

    Attributes:
      cluster_labels: Cluster global por muestra.
      clusters_per_class: Clusters por clase.
      states: FcmState por clase (vacío si clusters_per_class == 1).
      m: Fuzzifier usado (para asignar muestras nuevas).
    """

    cluster_labels: np.ndarray
    clusters_per_class: int
    states: dict[int, FcmState]
    m: float

    @property
    def num_clusters(self) -> int:
        return 2 * self.clusters_per_class

    @property
    def cluster_classes(self) -> np.ndarray:
        """Clase de cada cluster global (regla de offset)."""
        return np.repeat([HEALTHY, SICK], self.clusters_per_class)

    def assign(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Cluster global de muestras nuevas usando los centros de su propia clase.

        Se usa solo para derivar la verdad de cluster en test (evaluación).
        """
        y = np.asarray(y, dtype=np.int64)
        out = y * self.clusters_per_class
        if self.clusters_per_class == 1:
            return out
        for label in (HEALTHY, SICK):
            mask = y == label
            if mask.any():
                out[mask] += self.states[label].predict(X[mask], self.m)
        return out


def cluster_per_class(
    X: np.ndarray,
    y: np.ndarray,
    clusters_per_class: int,
    config: FcmConfig,
) -> PerClassClustering:
    """Corre FCM por separado sobre cada clase (sin usar la etiqueta dentro del FCM).

    Args:
      X: Datos n × d.
      y: Etiquetas binarias (solo para separar los subconjuntos).
      clusters_per_class: Clusters por clase (>= 1).
      config: Parámetros FCM (num_clusters se reemplaza).

    Returns:
      PerClassClustering con etiquetas en [0, 2·clusters_per_class).

    Raises:
      InsufficientDataError: Si alguna clase tiene menos muestras que clusters.
    """
    X = _check_2d("X", X)
    y = np.asarray(y, dtype=np.int64)
    if clusters_per_class < 1:
        raise ValueError(f"clusters_per_class={clusters_per_class} debe ser >= 1.")

    labels = np.empty(X.shape[0], dtype=np.int64)
    states: dict[int, FcmState] = {}
    for label in (HEALTHY, SICK):
        idx = np.flatnonzero(y == label)
        if idx.size < clusters_per_class:
            raise InsufficientDataError(
                f"La clase {label} tiene {idx.size} muestras; se requieren >= {clusters_per_class} para clusterizar."
            )
        offset = label * clusters_per_class
        if clusters_per_class == 1:
            labels[idx] = offset
            continue
        cfg = config.model_copy(
            update={"num_clusters": clusters_per_class, "seed": _class_seed(config.seed, label)}
        )
        state = run_fcm(X[idx], cfg)
        states[label] = state
        labels[idx] = state.labels + offset
        log.debug(
            "FCM clase=%d | n=%d | iters=%d | J=%.6g",
            label, idx.size, state.iterations_run, state.final_objective,
        )

    return PerClassClustering(
        cluster_labels=labels,
        clusters_per_class=clusters_per_class,
        states=states,
        m=config.m,
    )


def cluster_dataset_per_class(dataset: Dataset, clusters_per_class: int, config: FcmConfig) -> Dataset:
    """Asigna cluster_label a cada muestra clusterizando cada clase por separado.

    Healthy ocupa [0, clusters_per_class) y Sick [clusters_per_class, 2·clusters_per_class).

    Args:
      dataset: Dataset con ambas clases.
      clusters_per_class: Clusters por clase.
      config: Parámetros FCM.

    Returns:
      Dataset con cluster_label y num_clusters = 2·clusters_per_class.
    """
    result = cluster_per_class(dataset.matrix(), dataset.labels(), clusters_per_class, config)
    return dataset.with_cluster_labels(result.cluster_labels, result.num_clusters)


@dataclass(frozen=True, eq=False)
class JointClustering:
    """Clustering conjunto de todas las muestras (variante de comparación).

    Los clusters se renumeran para que los de mayoría Healthy vayan primero;
    `cluster_classes` guarda la clase mayoritaria de cada cluster.
    """

    cluster_labels: np.ndarray
    cluster_classes: np.ndarray
    state: FcmState
    order: np.ndarray
    m: float

    @property
    def num_clusters(self) -> int:
        return int(self.cluster_classes.size)

    def assign(self, X: np.ndarray, y: np.ndarray | None = None) -> np.ndarray:
        """Cluster (renumerado) de muestras nuevas; no usa la etiqueta."""
        raw = self.state.predict(X, self.m)
        return np.argsort(self.order)[raw]


def cluster_jointly(
    X: np.ndarray,
    y: np.ndarray,
    clusters_per_class: int,
    config: FcmConfig,
) -> JointClustering:
    """FCM sobre todas las muestras con 2·clusters_per_class clusters.

    Cada cluster toma la clase mayoritaria de sus miembros (empate -> Healthy).
    """
    X = _check_2d("X", X)
    y = np.asarray(y, dtype=np.int64)
    c = 2 * clusters_per_class
    state = run_fcm(X, config.model_copy(update={"num_clusters": c}))
    raw = state.labels
    classes = np.array(
        [int(np.sum(y[raw == i] == SICK) > np.sum(y[raw == i] == HEALTHY)) for i in range(c)],
        dtype=np.int64,
    )
    order = np.argsort(classes, kind="stable")
    rank = np.argsort(order)
    log.info(
        "FCM conjunto | c=%d | clusters healthy=%d | sick=%d",
        c, int(np.sum(classes == HEALTHY)), int(np.sum(classes == SICK)),
    )
    return JointClustering(
        cluster_labels=rank[raw],
        cluster_classes=classes[order],
        state=state,
        order=order,
        m=config.m,
    )


def cluster_purity(labels: np.ndarray, truth: np.ndarray) -> float:
    """Fracción de muestras que comparten el grupo mayoritario de su cluster."""
    labels = np.asarray(labels)
    truth = np.asarray(truth)
    if labels.size == 0:
        return 0.0
    total = 0
    for cluster in np.unique(labels):
        _, counts = np.unique(truth[labels == cluster], return_counts=True)
        total += int(counts.max())
    return total / labels.size
