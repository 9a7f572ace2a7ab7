"""Configuración de ejecución del pipeline.

Usa pydantic-settings para cargar configuración desde:
  - variables de entorno
  - archivo .env (opcional)

Prefijo de entorno:
  FCMDNN_

Ejemplo:
  FCMDNN_SEED=7
  FCMDNN_LOG_LEVEL=DEBUG
  FCMDNN_JOBS=4

La configuración del experimento (redes, FCM, preprocesamiento) vive en
`fcmdnn.config`; aquí solo van perillas de ejecución.
"""

from __future__ import annotations

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class FcmDnnSettings(BaseSettings):
    """Settings de ejecución.

    Attributes:
      seed: Semilla maestra usada cuando no se pasa `--seed` (FCMDNN_SEED).
      log_level: Nivel de logging (INFO, DEBUG, ...).
      jobs: Folds en paralelo.
      out_dir: Directorio base para artefactos de corridas.
      fit_before_split: Normaliza y clusteriza antes de particionar (filtra estadísticas de test).
      audit: Activa el modo de auditoría de fuga por ids.
    """

    model_config = SettingsConfigDict(
        env_prefix="FCMDNN_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    seed: int = Field(default=7, ge=0)
    log_level: str = "INFO"
    jobs: int = Field(default=1, ge=1)
    out_dir: str = "runs"
    fit_before_split: bool = False
    audit: bool = True
