"""Logging configuration for treeaut."""

import logging
import sys

from .errors import ConfigError

DETAILED_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
BRIEF_FORMAT = "treeaut[%(process)d]: %(message)s"


def setup_logging(log_target: str = "stderr", level: str = "INFO", console: bool = False) -> None:
    """
    Configure logging to stderr or a file.

    Standard output carries trees, CSV and JSON, so no handler writes there.

    Args:
        log_target: "stderr" for the standard error stream, or a file path for file logging.
        level: Log level name (DEBUG, INFO, WARNING, ERROR).
        console: If True, file logging is mirrored to stderr, and stderr
            logging switches to the timestamped format.

    Raises:
        ConfigError: If ``level`` is not a logging level name.
    """
    log_level = logging.getLevelName(level.upper())
    if not isinstance(log_level, int):
        raise ConfigError(f"Unknown log level: {level!r}")

    formatter = logging.Formatter(DETAILED_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    root_logger.handlers.clear()

    handlers = []
    if log_target == "stderr":
        stderr_handler = logging.StreamHandler(sys.stderr)
        stderr_handler.setFormatter(formatter if console else logging.Formatter(BRIEF_FORMAT))
        handlers.append(stderr_handler)
    else:
        file_handler = logging.FileHandler(log_target)
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)
        if console:
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setFormatter(formatter)
            handlers.append(console_handler)

    for handler in handlers:
        handler.setLevel(log_level)
        root_logger.addHandler(handler)

    logging.debug(f"Logging initialized: level={level}, target={log_target}")
