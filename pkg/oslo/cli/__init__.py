from oslo.cli._logging import LOG_FORMAT, configure_logging
from oslo.cli._main import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, build_parser, main

__all__ = [
    "LOG_FORMAT",
    "configure_logging",
    "EXIT_NUMERIC",
    "EXIT_OK",
    "EXIT_USAGE",
    "build_parser",
    "main",
]
