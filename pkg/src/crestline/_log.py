"""Logging setup for the crestline command line."""

from __future__ import annotations

import logging
import os
import sys

__all__ = ["configure_logging", "LOG_LEVEL_ENV"]

LOG_LEVEL_ENV = "WAVE_LOG_LEVEL"

_LEVELS: dict[str, int] = {
    "error": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def configure_logging(level: str | None = None) -> logging.Logger:
    """Attach one stderr handler to the package logger.

    Args:
        level: One of 'error', 'info', 'debug'. Defaults to $WAVE_LOG_LEVEL,
            then 'error'. Unknown names fall back to 'error'.

    Returns:
        The configured `crestline` logger. Calling again replaces the handler.
    """
    name = (level or os.environ.get(LOG_LEVEL_ENV, "error")).strip().lower()
    logger = logging.getLogger("crestline")
    logger.setLevel(_LEVELS.get(name, logging.ERROR))
    for handler in list(logger.handlers):
        if getattr(handler, "_crestline", False):
            logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler._crestline = True  # type: ignore[attr-defined]
    logger.addHandler(handler)
    return logger
