"""
Logging setup: stdlib loggers rendered by rich on stderr.

Stdout is reserved for data (digit strings, JSON, tables), so log records never
land there.
"""

from __future__ import annotations

import logging

from rich.console import Console
from rich.logging import RichHandler

ROOT_LOGGER = "machin_forge"

_handler: RichHandler | None = None


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def configure_logging(verbose: bool = False, debug: bool = False) -> logging.Logger:
    """Attach a single stderr RichHandler to the package logger."""
    global _handler

    level = logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING
    root = logging.getLogger(ROOT_LOGGER)
    root.setLevel(level)

    if _handler is None:
        _handler = RichHandler(
            console=Console(stderr=True),
            show_path=debug,
            rich_tracebacks=debug,
            markup=False,
        )
        _handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
        root.addHandler(_handler)
        root.propagate = False
    _handler.setLevel(level)
    return root
