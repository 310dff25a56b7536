"""
Rotating logger for STURMLAB runs
Console diagnostics on stderr, optional size-rotated file log (logs/sturmlab.log)
"""

import logging
import logging.handlers
import platform
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import psutil

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

VERBOSITY_LEVELS = {
    0: logging.WARNING,
    1: logging.INFO,
    2: logging.DEBUG,
}


class RotatingLogger:
    """Configures the sturmlab logger hierarchy"""

    def __init__(self,
                 level: int = logging.WARNING,
                 log_dir: Optional[str] = None,
                 max_bytes: int = 10 * 1024 * 1024,  # 10MB
                 backup_count: int = 4):
        self.level = level
        self.log_dir = Path(log_dir) if log_dir else None
        self.max_bytes = max_bytes
        self.backup_count = backup_count

        self._setup_logger("sturmlab")

    def _setup_logger(self, name: str):
        """Attach console and (optional) rotating file handlers"""
        logger = logging.getLogger(name)
        logger.setLevel(logging.DEBUG)
        logger.handlers.clear()

        formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

        # stdout is reserved for CSV/JSON results
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(self.level)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            file_handler = logging.handlers.RotatingFileHandler(
                filename=self.log_dir / f"{name}.log",
                maxBytes=self.max_bytes,
                backupCount=self.backup_count,
                encoding='utf-8'
            )
            file_handler.setLevel(min(self.level, logging.INFO))
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

        logger.propagate = False

    def get_logger(self, name: str = "sturmlab") -> logging.Logger:
        """Get a logger by name"""
        return logging.getLogger(name)

    def log_system_info(self):
        """Log platform facts relevant to solver timing"""
        logger = self.get_logger("sturmlab.system")
        info = get_system_info()
        for key, value in info.items():
            logger.debug(f"{key}: {value}")


def get_system_info() -> Dict[str, Any]:
    """Platform, interpreter and hardware summary"""
    return {
        "platform": platform.platform(),
        "python": platform.python_version(),
        "cpu_count": psutil.cpu_count(logical=True),
        "memory_gb": round(psutil.virtual_memory().total / (1024 ** 3), 2),
    }


def setup_logging(verbosity: int = 0, log_dir: Optional[str] = None) -> RotatingLogger:
    """Configure logging from a -v count and an optional log directory"""
    level = VERBOSITY_LEVELS.get(min(max(verbosity, 0), 2), logging.WARNING)
    rotating = RotatingLogger(level=level, log_dir=log_dir)
    rotating.log_system_info()
    return rotating
