"""
Logging Management for the WPSN allocator

Package logger setup shared by the CLI and the test helpers.
"""

import logging
from pathlib import Path
from typing import Optional

PACKAGE_LOGGER = 'wpsn'
DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class LogManager:
    """Logging management utility."""

    @staticmethod
    def setup_logging(
        log_level: int = logging.INFO,
        log_file: Optional[Path] = None,
        log_format: str = DEFAULT_FORMAT
    ) -> logging.Logger:
        """
        Configure the ``wpsn`` logger with a console handler and an optional file handler.

        Library modules log under ``src.*``; both trees are routed to the same
        handlers. Calling this again replaces the handlers instead of stacking them.
        """
        logger = logging.getLogger(PACKAGE_LOGGER)
        library = logging.getLogger('src')
        formatter = logging.Formatter(log_format)

        handlers = [logging.StreamHandler()]
        if log_file:
            log_file.parent.mkdir(parents=True, exist_ok=True)
            handlers.append(logging.FileHandler(log_file))

        for target in (logger, library):
            for old in list(target.handlers):
                target.removeHandler(old)
                old.close()
            target.setLevel(log_level)
            for handler in handlers:
                handler.setFormatter(formatter)
                target.addHandler(handler)

        return logger

    @staticmethod
    def level_from_name(name: str) -> int:
        """Map a level name such as ``"debug"`` to its logging constant."""
        level = logging.getLevelName(str(name).upper())
        if not isinstance(level, int):
            raise ValueError(f"Unknown log level: {name}")
        return level
