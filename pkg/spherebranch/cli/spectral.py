"""
`certify` and `spectrum` subcommands.
"""

import argparse

from .options import float_tuple, without_none


def build_certify(args: argparse.Namespace) -> dict:
    return without_none(command="certify", lambda_star=args.lambda_star, window=args.window)


def build_spectrum(args: argparse.Namespace) -> dict:
    return without_none(command="spectrum", window=args.window)


def register(subparsers, common: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("certify", parents=[common], help="check H1-H3 at an eigenvalue")
    p.add_argument("--lambda-star", type=float, help="eigenvalue to certify (default: every one in --window)")
    p.add_argument("--window", type=float_tuple(2), help="lo,hi (default: -1,10.5)")
    p.set_defaults(build=build_certify)

    p = subparsers.add_parser("spectrum", parents=[common], help="real eigenvalues with multiplicities")
    p.add_argument("--window", type=float_tuple(2), help="lo,hi (default: -1,10.5)")
    p.set_defaults(build=build_spectrum)
