"""Cyclic logging with line-based rotation."""

import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class LineCountRotatingFileHandler(RotatingFileHandler):
    """Rotating file handler that rolls over after a fixed number of records."""

    def __init__(
        self,
        filename: Path,
        max_lines: int = 2000,
        backup_count: int = 1,
        encoding: Optional[str] = "utf-8",
    ):
        """Initialize handler.

        Args:
            filename: Log file path
            max_lines: Records written before rollover
            backup_count: Number of rolled files kept
            encoding: File encoding
        """
        self.max_lines = max_lines
        self.line_count = 0
        super().__init__(
            filename=str(filename),
            maxBytes=0,
            backupCount=backup_count,
            encoding=encoding,
        )
        self._count_existing_lines()

    def _count_existing_lines(self) -> None:
        path = Path(self.baseFilename)
        if path.exists():
            with open(path, "r", encoding=self.encoding) as f:
                self.line_count = sum(1 for _ in f)

    def emit(self, record: logging.LogRecord) -> None:
        super().emit(record)
        self.line_count += 1
        if self.line_count >= self.max_lines:
            self.doRollover()
            self.line_count = 0


def setup_cyclic_logger(
    name: str,
    log_file: Path,
    max_lines: int = 2000,
    level: str = "INFO",
    console: bool = True,
) -> logging.Logger:
    """Configure a named logger writing to a line-rotated file and the console.

    Args:
        name: Logger name (stages use ``stage.<name>``)
        log_file: Path to log file
        max_lines: Records before rotation
        level: Logging level name
        console: Also attach a stderr handler

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    for handler in list(logger.handlers):
        handler.close()
    logger.handlers.clear()
    logger.propagate = False

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)

    log_file.parent.mkdir(parents=True, exist_ok=True)
    file_handler = LineCountRotatingFileHandler(filename=log_file, max_lines=max_lines)
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)

    if console:
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    return logger


def configure_library_logging(level: str = "INFO") -> None:
    """Route ``pdgd_ftc.*`` module loggers to stderr at the given level."""
    root = logging.getLogger("pdgd_ftc")
    root.setLevel(getattr(logging, level.upper(), logging.INFO))
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
        root.addHandler(handler)
