"""
Argument types shared by the subcommands.
"""

import argparse
from typing import Tuple


def float_tuple(count: int):
    """argparse type for `count` comma-separated floats."""

    def parse(text: str) -> Tuple[float, ...]:
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {text!r}")
        try:
            return tuple(float(p) for p in parts)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number list: {text!r}")

    return parse


def int_pair(text: str) -> Tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated integers, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer pair: {text!r}")


def direction(text: str) -> int:
    if text in ("+1", "1", "+"):
        return 1
    if text in ("-1", "-"):
        return -1
    raise argparse.ArgumentTypeError(f"direction must be +1 or -1, got {text!r}")


def without_none(**values) -> dict:
    """Drop unset flags so schema defaults apply."""
    return {k: v for k, v in values.items() if v is not None}
