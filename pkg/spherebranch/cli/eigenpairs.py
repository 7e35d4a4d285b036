"""
`map` subcommand.
"""

import argparse

from .options import float_tuple, int_pair, without_none


def build_map(args: argparse.Namespace) -> dict:
    return without_none(command="map", window=args.window, grid=args.grid)


def register(subparsers, common: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("map", parents=[common], help="components of the eigenpair set")
    p.add_argument("--window", type=float_tuple(4), required=True, help="s_min,s_max,lambda_min,lambda_max")
    p.add_argument("--grid", type=int_pair, help="grid points along s,lambda (default: from settings)")
    p.set_defaults(build=build_map)
