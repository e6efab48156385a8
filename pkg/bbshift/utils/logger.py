"""
BBShift Logging System

This module defines customized logging tools for BBShift.
Used to track estimation decisions, detection outcomes and experiment progress.
"""

import codecs
import json
import logging
import os
import sys
import threading
import time
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, List, Optional

# Log file size and rotation settings
MAX_LOG_SIZE = 10 * 1024 * 1024  # 10 MB
BACKUP_COUNT = 5

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_log_directory(log_dir: str) -> None:
    """
    Create log directory.

    Args:
        log_dir: Log directory to create
    """
    os.makedirs(log_dir, exist_ok=True)


class Utf8ConsoleHandler(logging.StreamHandler):
    """
    StreamHandler that writes UTF-8 to stderr regardless of the platform
    console encoding.
    """

    def __init__(self, stream=None):
        if stream is None:
            stream = sys.stderr

        if hasattr(stream, 'buffer'):
            stream = codecs.getwriter('utf-8')(stream.buffer, 'replace')

        super().__init__(stream)


def _configured_level() -> int:
    """Resolve the log level from the system configuration."""
    from bbshift.core.config_loader import config_loader

    name = str(config_loader.get("system.log_level", "INFO")).upper()
    return getattr(logging, name, logging.INFO)


def get_logger(name: str, log_file: Optional[str] = None, level: Optional[int] = None) -> logging.Logger:
    """
    Create a named logger.

    Args:
        name: Logger name
        log_file: Log file path (if None, logs only to console)
        level: Log level (default: ``system.log_level`` from configuration)

    Returns:
        Configured logger object
    """
    logger = logging.getLogger(name)
    logger.setLevel(level if level is not None else _configured_level())

    if logger.handlers:
        return logger

    formatter = logging.Formatter(LOG_FORMAT)

    console_handler = Utf8ConsoleHandler()
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir:
            setup_log_directory(log_dir)

        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=MAX_LOG_SIZE,
            backupCount=BACKUP_COUNT,
            encoding='utf-8'
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    # Console output is already handled here
    logger.propagate = False
    return logger


class JSONLogger:
    """
    Maintains structured log records in JSON lines format.
    The experiment harness writes one record per finished replication.
    """

    def __init__(self, name: str, log_dir: str, console_output: bool = False):
        """
        Initialize JSON logger.

        Args:
            name: Logger name
            log_dir: Log directory
            console_output: Whether to echo records to the console
        """
        self.name = name
        self.log_dir = log_dir

        setup_log_directory(log_dir)

        self.log_file = os.path.join(log_dir, f"{name.lower().replace(' ', '_')}.jsonl")

        self.logger = logging.getLogger(f"json_logger_{name}")
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False

        if self.logger.handlers:
            for handler in list(self.logger.handlers):
                handler.close()
            self.logger.handlers.clear()

        formatter = logging.Formatter('%(message)s')

        file_handler = RotatingFileHandler(
            self.log_file,
            maxBytes=MAX_LOG_SIZE,
            backupCount=BACKUP_COUNT,
            encoding='utf-8'
        )
        file_handler.setFormatter(formatter)
        self.logger.addHandler(file_handler)

        if console_output:
            console_handler = Utf8ConsoleHandler()
            console_handler.setFormatter(formatter)
            self.logger.addHandler(console_handler)

        self.lock = threading.Lock()

    def log(self, data: Dict[str, Any], level: str = "INFO") -> None:
        """
        Create a log record in JSON format.

        Args:
            data: Log data
            level: Log level
        """
        with self.lock:
            log_entry = {
                "timestamp": time.time(),
                "logger": self.name,
                "level": level,
                "data": data
            }
            self.logger.info(json.dumps(log_entry, ensure_ascii=False, default=str))

    def info(self, message: str, **kwargs) -> None:
        """Write a record at INFO level."""
        self.log({"message": message, **kwargs}, "INFO")

    def warning(self, message: str, **kwargs) -> None:
        """Write a record at WARNING level."""
        self.log({"message": message, **kwargs}, "WARNING")

    def close(self) -> None:
        """Flush and detach the file handlers."""
        for handler in list(self.logger.handlers):
            handler.close()
            self.logger.removeHandler(handler)


def read_json_log(log_file: str) -> List[Dict[str, Any]]:
    """
    Read back the records written by a JSONLogger.

    Args:
        log_file: Path of the ``.jsonl`` file

    Returns:
        List of decoded records, invalid lines skipped
    """
    records = []
    if not os.path.exists(log_file):
        return records

    with open(log_file, 'r', encoding='utf-8') as f:
        for line in f:
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError:
                # Skip partially written lines
                pass
    return records
