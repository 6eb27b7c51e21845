"""
Logger for ulamlab runs

Core modules log through ``logging.getLogger(__name__)``; all of them sit
under the ``ulamlab`` logger configured here, so one level covers the CLI,
the verification runner and the numeric kernels.
"""

import logging
import sys
import time
from contextlib import contextmanager
from typing import Iterator

# Elapsed milliseconds since start instead of wall-clock time
LOG_FORMAT = '%(relativeCreated)9.0fms %(levelname)-7s %(name)s: %(message)s'


class Logger:
    def __init__(self, name: str = "ulamlab", level: str = "WARNING"):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(getattr(logging, level.upper(), logging.WARNING))

        # Avoid duplicate handlers
        if not self.logger.handlers:
            handler = logging.StreamHandler(sys.stderr)
            handler.setFormatter(logging.Formatter(LOG_FORMAT))
            self.logger.addHandler(handler)

    def debug(self, message: str):
        self.logger.debug(message)

    def info(self, message: str):
        self.logger.info(message)

    def warning(self, message: str):
        self.logger.warning(message)

    def error(self, message: str):
        self.logger.error(message)

    @contextmanager
    def timed(self, label: str) -> Iterator[None]:
        """Log ``label`` with its wall time in seconds at INFO on exit."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.logger.info(f"{label} took {time.perf_counter() - start:.3f}s")


def setup_logger(name: str = "ulamlab", level: str = "WARNING") -> Logger:
    """Setup and return a logger instance"""
    return Logger(name, level)
