import logging
import os
import sys
from datetime import datetime
from logging.handlers import RotatingFileHandler
from pathlib import Path

from src.config import APP_NAME, LOG_BACKUP_COUNT, LOG_DIR, LOG_FORMAT, LOG_LEVEL, LOG_MAX_SIZE


def setup_logging(app_name: str = APP_NAME, log_dir: Path | None = None, level: str | None = None) -> logging.Logger:
    """Set up application logging with console and file handlers.

    Calling it again reconfigures the handlers instead of stacking new ones.

    Args:
        app_name: Name of the application (used for logger name)
        log_dir: Directory for the rotating log files, defaults to LOG_DIR
        level: Log level name, defaults to LOG_LEVEL

    Returns:
        The configured logger instance
    """
    log_dir = Path(log_dir or LOG_DIR)
    level_value = getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO)

    # Create logs directory if it doesn't exist
    os.makedirs(log_dir, exist_ok=True)

    # Generate log filename with date
    today = datetime.now().strftime("%Y-%m-%d")
    log_filename = log_dir / f"{app_name}_{today}.log"

    logger = logging.getLogger(app_name)
    logger.setLevel(level_value)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    file_formatter = logging.Formatter(LOG_FORMAT)
    console_formatter = logging.Formatter("[%(levelname)s] %(message)s")

    file_handler = RotatingFileHandler(
        log_filename, maxBytes=LOG_MAX_SIZE, backupCount=LOG_BACKUP_COUNT, encoding="utf-8"
    )
    file_handler.setLevel(level_value)
    file_handler.setFormatter(file_formatter)

    # stdout is reserved for summaries and plot data
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(max(level_value, logging.WARNING))
    console_handler.setFormatter(console_formatter)

    logger.addHandler(file_handler)
    logger.addHandler(console_handler)

    logger.debug(f"Logging initialized - writing to {log_filename}")

    return logger


def get_logger(module_name: str) -> logging.Logger:
    """Get a logger for a specific module.

    Args:
        module_name: Usually __name__ from the calling module

    Returns:
        A logger instance with the module name
    """
    return logging.getLogger(f"{APP_NAME}.{module_name}")
