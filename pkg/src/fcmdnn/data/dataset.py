"""Tipos de datos del dataset y lectura/escritura en disco.

Layout en disco (un directorio por clase):

  root/
    healthy/   -> class_label = 0
      *.pgm | *.png
    sick/      -> class_label = 1
      *.pgm | *.png
    manifest.json   (opcional; lo escribe `write_dataset`)

Los archivos se enumeran en orden lexicográfico (primero healthy, luego sick)
para que los ids de muestra sean reproducibles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from fcmdnn.errors import ConfigurationError, EmptyClassError, ShapeMismatchError
from fcmdnn.io.image_client import ImageClient
from fcmdnn.utils.logging import get_logger

log = get_logger(__name__)

HEALTHY = 0
SICK = 1
CLASS_DIRS = {HEALTHY: "healthy", SICK: "sick"}
MANIFEST_NAME = "manifest.json"


class Provenance(str, Enum):
    """Origen del dataset."""

    loaded = "loaded"
    synthetic = "synthetic"


@dataclass(frozen=True, eq=False)
class Sample:
    """Una imagen en escala de grises con su etiqueta.

    Attributes:
      id: Id único (denso en [0, n) dentro del Dataset).
      pixels: Intensidades row-major (float64).
      width: Ancho en píxeles.
      height: Alto en píxeles.
      class_label: 0 = Healthy, 1 = Sick.
      cluster_label: Cluster asignado (opcional).
      pattern_id: Sub-patrón generador (solo datasets sintéticos).
      source: Nombre de archivo de origen (solo datasets cargados).
    """

    id: int
    pixels: np.ndarray
    width: int
    height: int
    class_label: int
    cluster_label: int | None = None
    pattern_id: int | None = None
    source: str | None = None

    def __post_init__(self) -> None:
        pixels = np.asarray(self.pixels, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "pixels", pixels)
        if pixels.size != self.width * self.height:
            raise ShapeMismatchError(
                f"Sample {self.id}: {pixels.size} píxeles != {self.width}x{self.height}"
            )
        if self.class_label not in (HEALTHY, SICK):
            raise ValueError(f"Sample {self.id}: class_label={self.class_label} no es binario.")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Colección ordenada de muestras con metadata de procedencia.

    Attributes:
      samples: Muestras (ids densos [0, n) en orden).
      num_clusters: Cantidad de clusters cuando hay cluster_label.
      provenance: loaded o synthetic.
      generator_seed: Semilla del generador (solo synthetic).
    """

    samples: tuple[Sample, ...]
    num_clusters: int | None = None
    provenance: Provenance = Provenance.loaded
    generator_seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))
        ids = [s.id for s in self.samples]
        if ids != list(range(len(ids))):
            raise ValueError("Los ids de muestra deben ser densos [0, n) y en orden.")
        with_cluster = [s.cluster_label is not None for s in self.samples]
        if any(with_cluster):
            if not all(with_cluster) or self.num_clusters is None:
                raise ValueError("Si una muestra tiene cluster_label, todas deben tenerlo y num_clusters debe existir.")
            for s in self.samples:
                if not 0 <= int(s.cluster_label) < self.num_clusters:  # type: ignore[arg-type]
                    raise ValueError(
                        f"Sample {s.id}: cluster_label={s.cluster_label} fuera de [0, {self.num_clusters})"
                    )

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def n(self) -> int:
        return len(self.samples)

    def shapes(self) -> set[tuple[int, int]]:
        """Conjunto de (width, height) presentes."""
        return {(s.width, s.height) for s in self.samples}

    def matrix(self) -> np.ndarray:
        """Matriz n × d de píxeles.

        Raises:
          ShapeMismatchError: Si las muestras tienen dimensiones mixtas.
        """
        if len(self.shapes()) > 1:
            raise ShapeMismatchError(f"Dimensiones mixtas en el dataset: {sorted(self.shapes())}")
        if not self.samples:
            return np.zeros((0, 0))
        return np.stack([s.pixels for s in self.samples])

    def labels(self) -> np.ndarray:
        return np.array([s.class_label for s in self.samples], dtype=np.int64)

    def cluster_labels(self) -> np.ndarray | None:
        if self.num_clusters is None:
            return None
        return np.array([s.cluster_label for s in self.samples], dtype=np.int64)

    def class_counts(self) -> dict[int, int]:
        y = self.labels()
        return {HEALTHY: int(np.sum(y == HEALTHY)), SICK: int(np.sum(y == SICK))}

    def with_pixels(self, matrix: np.ndarray, width: int, height: int) -> "Dataset":
        """Retorna un Dataset con nuevos píxeles (misma metadata y etiquetas).

        Args:
          matrix: n × (width*height).
          width: Nuevo ancho.
          height: Nuevo alto.
        """
        if matrix.shape[0] != self.n:
            raise ShapeMismatchError(f"Se esperaban {self.n} filas, llegaron {matrix.shape[0]}.")
        samples = tuple(
            replace(s, pixels=row, width=width, height=height)
            for s, row in zip(self.samples, matrix)
        )
        return replace(self, samples=samples)

    def with_cluster_labels(self, cluster_labels: Sequence[int], num_clusters: int) -> "Dataset":
        """Retorna un Dataset con cluster_label asignado a cada muestra."""
        if len(cluster_labels) != self.n:
            raise ShapeMismatchError(
                f"Se esperaban {self.n} cluster labels, llegaron {len(cluster_labels)}."
            )
        samples = tuple(
            replace(s, cluster_label=int(c)) for s, c in zip(self.samples, cluster_labels)
        )
        return replace(self, samples=samples, num_clusters=num_clusters)


def load_dataset(root_path: str | Path) -> Dataset:
    """Carga un dataset etiquetado desde `healthy/` y `sick/`.

    Args:
      root_path: Directorio raíz.

    Returns:
      Dataset con provenance=loaded.

    Raises:
      ConfigurationError: Si el directorio raíz no existe.
      IngestionError: Si una imagen no se puede leer (nombra el archivo).
      EmptyClassError: Si alguna clase queda sin imágenes.
    """
    root = Path(root_path)
    if not root.is_dir():
        raise ConfigurationError(f"No existe el directorio del dataset: {root}")

    client = ImageClient(root)
    files = {label: client.list_images(name) for label, name in CLASS_DIRS.items()}
    for label, paths in files.items():
        if not paths:
            raise EmptyClassError(
                f"La clase '{CLASS_DIRS[label]}' no tiene imágenes en {root / CLASS_DIRS[label]}"
            )

    samples: list[Sample] = []
    for label in (HEALTHY, SICK):
        for path in files[label]:
            pixels, width, height = client.read_image(path)
            samples.append(
                Sample(
                    id=len(samples),
                    pixels=pixels,
                    width=width,
                    height=height,
                    class_label=label,
                    source=f"{CLASS_DIRS[label]}/{path.name}",
                )
            )

    log.info(
        "Dataset cargado | root=%s | n=%d | healthy=%d | sick=%d",
        root,
        len(samples),
        len(files[HEALTHY]),
        len(files[SICK]),
    )
    return Dataset(samples=tuple(samples), provenance=Provenance.loaded)


def _file_name(sample: Sample, suffix: str) -> str:
    return f"img_{sample.id:05d}{suffix}"


def write_dataset(
    dataset: Dataset,
    out_dir: str | Path,
    *,
    suffix: str = ".pgm",
    manifest_extra: dict | None = None,
) -> Path:
    """Escribe un Dataset en el layout cargable + manifest.json.

    Los píxeles se redondean a 8-bit; para datasets de intensidades enteras
    la ida y vuelta con `load_dataset` es exacta.

    Args:
      dataset: Dataset a escribir.
      out_dir: Directorio destino (se crea si no existe).
      suffix: ".pgm" o ".png".
      manifest_extra: Campos extra para el manifest.

    Returns:
      Ruta al manifest escrito.
    """
    root = Path(out_dir)
    for name in CLASS_DIRS.values():
        (root / name).mkdir(parents=True, exist_ok=True)

    for s in dataset.samples:
        path = root / CLASS_DIRS[s.class_label] / _file_name(s, suffix)
        ImageClient.write_image(path, s.pixels, s.width, s.height)

    counts = dataset.class_counts()
    manifest = {
        "provenance": dataset.provenance.value,
        "generator_seed": dataset.generator_seed,
        "counts": {"healthy": counts[HEALTHY], "sick": counts[SICK]},
        "n": dataset.n,
        **dataset.meta,
        **(manifest_extra or {}),
    }
    manifest_path = root / MANIFEST_NAME
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    log.info("Dataset escrito | out=%s | n=%d", root, dataset.n)
    return manifest_path
