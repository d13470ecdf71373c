"""
Logging setup shared by the CLI and library modules.
"""
import logging
import sys
from typing import Optional, TextIO

from vacuumflow.core.config import settings

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


class StderrHandler(logging.StreamHandler):
    """Stream handler bound to whatever ``sys.stderr`` is when a record is emitted."""

    def __init__(self) -> None:
        super().__init__(sys.stderr)

    @property
    def stream(self) -> TextIO:
        return sys.stderr

    @stream.setter
    def stream(self, value: TextIO) -> None:
        pass


def configure_logging(level: Optional[str] = None, quiet: bool = False) -> None:
    """
    Configure the root ``vacuumflow`` logger.

    Safe to call repeatedly; the handler is installed once.

    Args:
        level: Level name; defaults to ``settings.LOG_LEVEL``
        quiet: Raise the threshold to WARNING regardless of ``level``
    """
    name = "WARNING" if quiet else (level or settings.LOG_LEVEL).upper()
    logger = logging.getLogger("vacuumflow")
    logger.setLevel(name)
    handlers = [h for h in logger.handlers if isinstance(h, StderrHandler)]
    if not handlers:
        handler = StderrHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
        handlers = [handler]
    for handler in handlers:
        handler.setLevel(name)
