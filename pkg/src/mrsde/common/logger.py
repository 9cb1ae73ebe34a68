"""Stdout logging shared by every mrsde module."""

import logging
import sys

LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
HANDLER_NAME = "mrsde-stdout"
LOG_FORMAT = "%(levelname)-8s :: %(asctime)s :: %(name)s :: %(message)s"
DATE_FORMAT = "%Y-%m-%dT%H:%M:%S"

_level = logging.INFO
_names: set[str] = set()


def _stdout_handler() -> logging.Handler:
    handler = logging.StreamHandler(stream=sys.stdout)
    handler.set_name(HANDLER_NAME)
    handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
    return handler


def get_logger(name: str) -> logging.Logger:
    """Package logger writing to stdout at the current run level.

    Args:
    ----
        name: name of module using the logger

    """
    logger = logging.getLogger(name)
    logger.setLevel(_level)
    _names.add(name)

    if not any(h.get_name() == HANDLER_NAME for h in logger.handlers):
        logger.addHandler(_stdout_handler())

    return logger


def set_level(level: str) -> None:
    """Apply a level to all package loggers, including ones created later."""
    global _level  # noqa: PLW0603

    if level not in LEVELS:
        msg = f"Unknown log level {level}, expected one of {LEVELS}"
        raise ValueError(msg)

    _level = logging.getLevelName(level)
    for name in _names:
        logging.getLogger(name).setLevel(_level)
