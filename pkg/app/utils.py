"""
Utility Module for the Social Image Tournament Lab

Provides logging, seed derivation, and CSV / JSON helpers.
"""

import csv
import io
import json
import logging
import sys
import zlib
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from dotenv import load_dotenv

try:
    from pythonjsonlogger.json import JsonFormatter
except ImportError:  # python-json-logger < 3
    from pythonjsonlogger.jsonlogger import JsonFormatter

from app.config import config, PROBABILITY_DECIMALS

# Load environment variables from .env file
load_dotenv()

LOGGER_NAME = "social_image_tournaments"


def setup_logging(log_level: str = "INFO", log_format: str = "text") -> logging.Logger:
    """
    Configure the project logger.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_format: "text" for human-readable lines, "json" for one JSON object per line

    Returns:
        logging.Logger: Configured logger instance
    """
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)

    # stdout carries CSV output, so logs go to stderr
    handler = logging.StreamHandler(sys.stderr)
    if log_format == "json":
        handler.setFormatter(
            JsonFormatter("%(asctime)s %(name)s %(levelname)s %(message)s")
        )
    else:
        handler.setFormatter(
            logging.Formatter(
                "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                datefmt="%Y-%m-%d %H:%M:%S",
            )
        )

    logger = logging.getLogger(LOGGER_NAME)
    logger.handlers.clear()
    logger.addHandler(handler)
    logger.setLevel(numeric_level)
    logger.propagate = False
    return logger


def derive_seed(seed: int, *keys: Union[int, str]) -> int:
    """
    Derive an independent child seed from a master seed and a path of keys.

    String keys are hashed with crc32 so the result is stable across processes.

    Args:
        seed: Master seed
        *keys: Integers or strings naming the sub-stream

    Returns:
        int: 32-bit child seed
    """
    entropy = [int(seed) & 0xFFFFFFFF]
    for key in keys:
        if isinstance(key, str):
            entropy.append(zlib.crc32(key.encode("utf-8")) & 0xFFFFFFFF)
        else:
            entropy.append(int(key) & 0xFFFFFFFF)
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def format_probability(value: Optional[float]) -> str:
    """Fixed-point rendering used for every probability-like CSV column."""
    if value is None:
        return ""
    return f"{value:.{PROBABILITY_DECIMALS}f}"


def format_flag(value: bool) -> str:
    return "true" if value else "false"


def write_csv(
    path: Optional[Union[str, Path]],
    header: Sequence[str],
    rows: Iterable[Sequence[object]],
) -> str:
    """
    Write rows under an exact header.

    Args:
        path: Destination file; None returns the text without writing
        header: Column names
        rows: Already formatted cell values

    Returns:
        str: The CSV text that was written
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    text = buffer.getvalue()

    if path is not None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {text.count(chr(10)) - 1} rows to {target}")
    return text


def read_json_document(path: Union[str, Path]) -> dict:
    """
    Read a flat JSON document from disk.

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If the content is not a JSON object
    """
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Document not found: {file_path}")

    document = json.loads(file_path.read_text(encoding="utf-8"))
    if not isinstance(document, dict):
        raise ValueError(f"{file_path} must contain a JSON object")
    return document


# ============================================================================
# Global Initialization
# ============================================================================

logger = setup_logging(config.log_level, config.log_format)
logger.debug("Application utilities initialized successfully")
