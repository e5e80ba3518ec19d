import logging
import os
from typing import Dict, Optional

import colorlog

_built_loggers: Dict[str, logging.Logger] = {}
_level_override: Optional[str] = None


def default_level() -> str:
    """Level used when the caller does not pass one: set_logging_level, else R0_LOG_LEVEL, else WARNING."""
    return _level_override or os.getenv("R0_LOG_LEVEL", "WARNING").upper()


def build_logger(logger_name: str, logging_level: str = None) -> logging.Logger:
    """
    Set up a logger with a specific logging level and format.

    Attributes:
        logger_name: str
            The name of the logger displayed in the message.
        logging_level: str
            The level of logging detail. Lower level are not displayed.
            ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
            Defaults to default_level().

    Returns:
        logging.Logger: The logger object.
    """

    logger = logging.getLogger(logger_name)

    # Building the same logger twice must not duplicate every message.
    if logger_name in _built_loggers:
        if logging_level:
            logger.setLevel(logging_level)
        return logger

    logger.setLevel(logging_level or default_level())
    handler = logging.StreamHandler()
    formatter = colorlog.ColoredFormatter(
        "%(log_color)s%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt=None,
        reset=True,
        log_colors={
            "DEBUG": "cyan",
            "INFO": "white",
            "WARNING": "yellow",
            "ERROR": "red",
            "CRITICAL": "red,bg_white",
        },
    )
    handler.setFormatter(formatter)
    logger.addHandler(handler)
    logger.propagate = False
    _built_loggers[logger_name] = logger
    return logger


def set_logging_level(logging_level: str) -> None:
    """
    Change the level of every logger created through build_logger, and of those built afterwards.

    :param logging_level: One of "DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL".
    """
    global _level_override
    _level_override = logging_level.upper()
    for logger in _built_loggers.values():
        logger.setLevel(_level_override)
