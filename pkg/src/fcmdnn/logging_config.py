"""Logging del CLI de fcmdnn: RichHandler sobre stderr, stdout queda para JSON y tablas."""

from __future__ import annotations

import logging

from rich.console import Console
from rich.logging import RichHandler

from fcmdnn.errors import ConfigurationError

LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

# PIL loguea cada chunk PNG/PGM en DEBUG.
_QUIET_LOGGERS = ("PIL",)


def resolve_level(log_level: str) -> int:
    """Nombre de nivel a su valor numérico; nombres desconocidos son error de configuración."""
    name = log_level.strip().upper()
    if name not in LEVELS:
        raise ConfigurationError(f"Nivel de logging desconocido: {log_level!r} (válidos: {', '.join(LEVELS)})")
    return logging.getLevelName(name)


def setup_logging(log_level: str = "INFO") -> None:
    """Instala un RichHandler en stderr para todo el proceso.

    Args:
        log_level (str): DEBUG, INFO, WARNING, ERROR o CRITICAL.

    Raises:
        ConfigurationError: Si el nivel no existe.
    """
    level = resolve_level(log_level)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[
            RichHandler(
                console=Console(stderr=True),
                rich_tracebacks=True,
                markup=False,
                show_time=True,
                show_level=True,
                show_path=level <= logging.DEBUG,
            )
        ],
        force=True,
    )
    for name in _QUIET_LOGGERS:
        logging.getLogger(name).setLevel(max(level, logging.WARNING))
