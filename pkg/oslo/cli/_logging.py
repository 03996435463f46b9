"""
A module for the console logging of the oslo command
"""

import logging
from logging import Logger
from typing import Union

LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: Union[int, str] = logging.WARNING) -> Logger:
    """
    Sets the level of the package logger and attaches a stderr handler once.

    Args:
        level (int | str): A logging level or its name, e.g. "INFO".

    Returns:
        Logger: The "oslo" logger.

    Raises:
        ValueError: If the level name is unknown.
    """
    logger: Logger = logging.getLogger("oslo")
    logger.setLevel(level.upper() if isinstance(level, str) else level)
    if not logger.handlers:
        console_handler = logging.StreamHandler()
        console_handler.setLevel(logger.level)

        formatter = logging.Formatter(LOG_FORMAT)
        console_handler.setFormatter(formatter)

        logger.addHandler(console_handler)
    else:
        for handler in logger.handlers:
            handler.setLevel(logger.level)
    return logger
