"""
Runtime configuration.

Values come from the environment (a local .env file is loaded first):
- MDS53_DIR          default cluster directory
- MDS53_SYMBOL_SIZE  default symbol size in bytes for `encode`
- MDS53_REPORT_DIR   where text reports are written
- MDS53_LOG_LEVEL    log level used by the CLI
"""

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# File names inside a cluster directory
MANIFEST_NAME = "manifest.csv"
NODE_FILE_TEMPLATE = "node{node_id}.seg"

DEFAULT_SYMBOL_SIZE = 4096
LOG_LEVEL = os.getenv("MDS53_LOG_LEVEL", "WARNING").upper()


def default_cluster_dir() -> Path | None:
    """Cluster directory from MDS53_DIR, or None when unset."""
    value = os.getenv("MDS53_DIR")
    return Path(value) if value else None


def default_symbol_size() -> int:
    raw = os.getenv("MDS53_SYMBOL_SIZE")
    if not raw:
        return DEFAULT_SYMBOL_SIZE
    try:
        size = int(raw)
    except ValueError:
        raise ValueError(f"MDS53_SYMBOL_SIZE must be an integer, got {raw!r}") from None
    if size < 1:
        raise ValueError(f"MDS53_SYMBOL_SIZE must be positive, got {size}")
    return size


def report_dir() -> Path:
    return Path(os.getenv("MDS53_REPORT_DIR", "reports"))


def node_file_name(node_id: int) -> str:
    return NODE_FILE_TEMPLATE.format(node_id=node_id)
