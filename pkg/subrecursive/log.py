import logging
import sys

import colorlog

_FORMAT = "%(log_color)s%(levelname)-8s%(reset)s %(name)s: %(message)s"


def get_logger(name):
    """Return the package logger for a module."""
    return logging.getLogger(name)


def setup_logging(level="INFO"):
    """Install a single colored stderr handler on the package logger.

    Args:
        level: Logging level name or number.

    Returns:
        The configured package logger.
    """
    logger = logging.getLogger("subrecursive")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = colorlog.StreamHandler(sys.stderr)
    handler.setFormatter(colorlog.ColoredFormatter(
        _FORMAT,
        log_colors={
            "DEBUG": "cyan",
            "INFO": "green",
            "WARNING": "yellow",
            "ERROR": "red",
            "CRITICAL": "red,bg_white",
        },
    ))
    logger.addHandler(handler)
    logger.setLevel(level.upper() if isinstance(level, str) else level)
    logger.propagate = False
    return logger
