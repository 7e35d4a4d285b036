"""
Command-line interface for spherebranch.

Each subcommand module registers its parsers and a `build(args)` that turns
the parsed flags into the `run` section of a ScenarioConfig.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from .. import __version__
from ..config import get_config, load_config
from ..core.errors import SphereBranchError
from ..log import setup_logging
from ..models import ScenarioConfig, ToolSettings
from ..services.problems import load_problem_json, schema_error
from ..services.scenarios import run_spec
from . import continuation, degree, eigenpairs, examples, spectral

logger = logging.getLogger("CLI")

EXIT_OK = 0
EXIT_COMPUTATION = 2
EXIT_INVALID = 3


def common_parser() -> argparse.ArgumentParser:
    """Flags shared by every subcommand."""
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--spec", type=Path, help="problem spec JSON")
    p.add_argument("--out", type=Path, help="output directory (default: paths.output)")
    p.add_argument("--seed", type=int, help="seed for randomized checks (default: runtime.seed)")
    p.add_argument("--threads", type=int, help="worker threads (default: runtime.threads)")
    p.add_argument("--config", type=Path, help="settings YAML (default: config/config.yaml)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spherebranch",
        description="Spectra, degrees, branches and eigenpair maps of Lx + sN(x) = λCx on the unit sphere.",
    )
    parser.add_argument("--version", action="version", version=f"spherebranch {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = common_parser()
    for module in (spectral, degree, continuation, eigenpairs, examples):
        module.register(subparsers, common)
    return parser


def load_settings(config_path: Optional[Path]) -> ToolSettings:
    raw = load_config(config_path) if config_path is not None else get_config()
    try:
        return ToolSettings.model_validate(raw)
    except ValidationError as e:
        raise schema_error(e) from e


def scenario_from_args(args: argparse.Namespace, settings: ToolSettings) -> ScenarioConfig:
    seed = args.seed if args.seed is not None else settings.runtime.seed
    payload = {"run": args.build(args), "seed": seed}
    if args.spec is not None:
        payload["problem"] = load_problem_json(args.spec)
    if args.out is not None:
        payload["output"] = str(args.out)
    try:
        return ScenarioConfig.model_validate(payload)
    except ValidationError as e:
        raise schema_error(e) from e


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad flags; bad flags are invalid input
        return EXIT_OK if e.code in (0, None) else EXIT_INVALID

    try:
        settings = load_settings(args.config)
        setup_logging(settings.logging.level, force=True)
        config = scenario_from_args(args, settings)
        report = run_spec(config, settings, outdir=args.out, threads=args.threads)
    except SphereBranchError as e:
        print(f"error: {args.command}: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {args.command}: {e}", file=sys.stderr)
        return EXIT_COMPUTATION

    json.dump(report.deterministic_dump(), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_COMPUTATION", "EXIT_INVALID"]
