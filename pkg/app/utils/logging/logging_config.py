"""
Logging setup for the deformation toolkit.

Console lines go to stderr so that reports printed on stdout can be piped.
The optional rotating file receives one JSON object per record.
"""

import json
import logging
import logging.handlers
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

# Record attributes copied into structured entries when present
CONTEXT_FIELDS = ('component', 'action', 'command', 'order', 'degree',
                  'duration_ms', 'error_type', 'witness')

LEVEL_COLORS = {
    'DEBUG': '\033[36m',
    'INFO': '\033[32m',
    'WARNING': '\033[33m',
    'ERROR': '\033[31m',
    'CRITICAL': '\033[35m',
}


class StructuredFormatter(logging.Formatter):
    """One JSON line per record; computation context sits under "context"."""

    def format(self, record):
        entry = {
            'timestamp': datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'location': f"{record.module}.{record.funcName}:{record.lineno}",
        }
        context = {name: getattr(record, name) for name in CONTEXT_FIELDS if hasattr(record, name)}
        if context:
            entry['context'] = context
        if record.exc_info:
            entry['exception'] = self.formatException(record.exc_info)
        # witnesses may hold Fractions or Scalars
        return json.dumps(entry, default=str)


class ConsoleFormatter(logging.Formatter):
    """Short human-readable lines, coloured only on a terminal."""

    def __init__(self, use_color: bool = False):
        super().__init__()
        self.use_color = use_color

    def format(self, record):
        level = f"{record.levelname:8}"
        if self.use_color:
            level = f"{LEVEL_COLORS.get(record.levelname, '')}{level}\033[0m"

        tag = getattr(record, 'component', 'app')
        action = getattr(record, 'action', '')
        if action:
            tag += f":{action}"
        order = getattr(record, 'order', None)
        if order is not None:
            tag += f" n={order}"

        clock = datetime.fromtimestamp(record.created).strftime('%H:%M:%S')
        return f"{clock} {level} [{tag}] {record.getMessage()}"


@dataclass
class LoggingSettings:
    level: str = "INFO"
    console: bool = True
    file: bool = False
    log_dir: str = "logs"
    filename: str = "deformation.log"
    max_file_size_mb: int = 10
    backup_count: int = 5

    @classmethod
    def from_env(cls, level: Optional[str] = None) -> "LoggingSettings":
        return cls(
            level=(level or os.getenv('LOG_LEVEL', 'INFO')).upper(),
            console=os.getenv('LOG_CONSOLE', 'true').lower() == 'true',
            file=os.getenv('LOG_FILE', 'false').lower() == 'true',
            log_dir=os.getenv('LOG_DIR', 'logs'),
        )


def setup_logging(settings: LoggingSettings) -> logging.Logger:
    """Replace the root handlers according to settings."""
    level = getattr(logging, settings.level, logging.INFO)
    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    if settings.console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(ConsoleFormatter(use_color=sys.stderr.isatty()))
        console_handler.setLevel(max(logging.INFO, level))
        root_logger.addHandler(console_handler)

    if settings.file:
        Path(settings.log_dir).mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            Path(settings.log_dir) / settings.filename,
            maxBytes=settings.max_file_size_mb * 1024 * 1024,
            backupCount=settings.backup_count,
        )
        file_handler.setFormatter(StructuredFormatter())
        file_handler.setLevel(level)
        root_logger.addHandler(file_handler)

    return root_logger


def setup_logging_from_env(log_level: Optional[str] = None) -> logging.Logger:
    """Setup logging from LOG_* environment variables; log_level wins over LOG_LEVEL."""
    return setup_logging(LoggingSettings.from_env(log_level))
