"""Cliente IO para imágenes en escala de grises (PGM P5 / PNG 8-bit).

Decisión de diseño:
  - Se lee con Pillow y se exige modo "L" (8-bit, un canal); no se convierte
    color a gris para no esconder datos multicanal.
  - Los píxeles salen como float64 en [0, 255], en orden row-major.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from fcmdnn.errors import IngestionError

IMAGE_SUFFIXES = (".pgm", ".png")


@dataclass(frozen=True)
class ImageClient:
    """Wrapper simple para listar, leer y escribir imágenes de un directorio.

    Attributes:
      root: Directorio raíz (contiene `healthy/` y `sick/`).
    """

    root: Path

    def list_images(self, subdir: str) -> list[Path]:
        """Lista imágenes de un subdirectorio en orden lexicográfico de nombre.

        Args:
          subdir: Nombre del subdirectorio (p.ej. "healthy").

        Returns:
          Rutas ordenadas; lista vacía si el subdirectorio no existe.
        """
        folder = Path(self.root) / subdir
        if not folder.is_dir():
            return []
        return sorted(
            (p for p in folder.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES),
            key=lambda p: p.name,
        )

    @staticmethod
    def read_image(path: Path) -> tuple[np.ndarray, int, int]:
        """Lee una imagen 8-bit en escala de grises.

        Args:
          path: Ruta a la imagen.

        Returns:
          (pixels, width, height) con pixels float64 row-major.

        Raises:
          IngestionError: Si el archivo no se puede decodificar o no es 8-bit gris.
        """
        try:
            with Image.open(path) as img:
                img.load()
                if img.mode != "L":
                    raise IngestionError(str(path), f"modo '{img.mode}' no es 8-bit gris (L)")
                width, height = img.size
                pixels = np.asarray(img, dtype=np.uint8).astype(np.float64).reshape(-1)
        except IngestionError:
            raise
        except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as exc:
            raise IngestionError(str(path), str(exc)) from exc
        return pixels, width, height

    @staticmethod
    def write_image(path: Path, pixels: np.ndarray, width: int, height: int) -> None:
        """Escribe una imagen 8-bit (PGM si la extensión es .pgm, PNG si .png).

        Los valores se redondean y recortan a [0, 255].

        Args:
          path: Ruta destino.
          pixels: Vector row-major de largo width*height.
          width: Ancho.
          height: Alto.
        """
        arr = np.clip(np.rint(np.asarray(pixels, dtype=np.float64)), 0, 255).astype(np.uint8)
        # uint8 2-D => modo "L"
        img = Image.fromarray(arr.reshape(height, width))
        fmt = "PPM" if path.suffix.lower() == ".pgm" else "PNG"
        path.parent.mkdir(parents=True, exist_ok=True)
        img.save(path, format=fmt)
