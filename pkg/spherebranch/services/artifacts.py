"""
Artifact writers.

Numbers are written with 17 significant digits and '\\n' line endings so
identical runs produce identical files. All writes share one lock.
"""

import csv
import json
import logging
import threading
from pathlib import Path
from typing import Any, Iterable, List, Sequence

from ..core.continuation import Branch
from ..core.eigenpairs import EigenpairComponent

logger = logging.getLogger("Artifacts")

_write_lock = threading.Lock()


def format_number(value: float) -> str:
    return f"{float(value):.17g}"


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    with _write_lock:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([v if isinstance(v, (int, str)) else format_number(v) for v in row])
    logger.debug("Wrote %s", path)
    return path


def read_csv(path: Path) -> List[dict]:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def write_json(path: Path, payload: Any) -> Path:
    path = Path(path)
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    with _write_lock:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    logger.debug("Wrote %s", path)
    return path


def branch_header(dim: int) -> List[str]:
    return ["step", "s", "lambda"] + [f"x_{i}" for i in range(1, dim + 1)] + ["residual"]


def write_branch(path: Path, branch: Branch) -> Path:
    dim = branch.anchor.x.size
    rows = ([step, p.s, p.lam, *p.x, p.residual] for step, p in enumerate(branch.points))
    return write_csv(path, branch_header(dim), rows)


def write_component(path: Path, component: EigenpairComponent) -> Path:
    return write_csv(path, ["sample", "s", "lambda"], ([i, s, lam] for i, (s, lam) in enumerate(component.samples)))
