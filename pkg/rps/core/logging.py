import logging
import sys

LOG_FORMAT = "%(levelname)-5.5s [%(name)s] %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """Send package logs to stderr; stdout stays reserved for command output"""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))

    root = logging.getLogger("rps")
    root.handlers = [handler]
    root.setLevel(level.upper())
    root.propagate = False
