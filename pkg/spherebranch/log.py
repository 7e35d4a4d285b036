"""
Log setup.

Records render as ``[Tag] message`` where Tag is the logger name.
"""

import logging
import os
import sys

LEVELS = {
    "error": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

_configured = False


def resolve_level(name: str | None) -> int:
    """Map a SPHEREBRANCH_LOG value to a logging level."""
    if not name:
        return logging.ERROR
    level = LEVELS.get(name.strip().lower())
    if level is None:
        logging.getLogger("Config").warning(
            "Unknown log level %r, falling back to info", name
        )
        return logging.INFO
    return level


def setup_logging(level: str | None = None, force: bool = False) -> None:
    """Configure the root logger once; SPHEREBRANCH_LOG applies when `level` is not given."""
    global _configured
    if _configured and not force:
        return

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("[%(name)s] %(message)s"))

    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(resolve_level(level or os.getenv("SPHEREBRANCH_LOG")))
    _configured = True
