"""
Structured logging configuration using structlog.

JSON lines on stderr so that stdout stays free for command output.
"""

import logging
import sys
from pathlib import Path

import structlog
from structlog.stdlib import LoggerFactory

PACKAGE_LOGGER = "dualhaze"


def setup_structured_logging(log_level: str = "WARNING", log_file: str | None = None) -> None:
    """
    Configure structured logging with JSON output.

    Args:
        log_level: Level of the stderr handler (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional path of a file receiving this package's DEBUG records and above
    """
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.dev.set_exc_info,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            structlog.processors.JSONRenderer(),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(logging.NOTSET),
        context_class=dict,
        logger_factory=LoggerFactory(),
        cache_logger_on_first_use=False,
    )
    level = getattr(logging, log_level.upper(), logging.WARNING)
    root = logging.getLogger()
    root.handlers.clear()
    root.setLevel(level)
    # package records reach the handlers at any level; each handler filters
    logging.getLogger(PACKAGE_LOGGER).setLevel(logging.DEBUG if log_file else level)

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setLevel(level)
    stream_handler.setFormatter(logging.Formatter("%(message)s"))
    root.addHandler(stream_handler)

    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter("%(message)s"))
        root.addHandler(file_handler)
