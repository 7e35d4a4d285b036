"""
`degree` and `conjecture` subcommands.
"""

import argparse

from .options import float_tuple, without_none


def build_degree(args: argparse.Namespace) -> dict:
    return without_none(
        command="degree",
        alpha=args.alpha,
        beta=args.beta,
        lambda_hat=args.lambda_hat,
        epsilon=args.epsilon,
    )


def build_conjecture(args: argparse.Namespace) -> dict:
    return without_none(command="conjecture", window=args.window)


def register(subparsers, common: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("degree", parents=[common], help="degree of ψ on (α, β) × S")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--lambda-hat", type=float, help="resolvent point for the LS-signs")
    p.add_argument("--epsilon", type=float, help="initial ε for non-simple eigensets")
    p.set_defaults(build=build_degree)

    p = subparsers.add_parser("conjecture", parents=[common], help="degree vs LS-sign jump over a sweep")
    p.add_argument("--window", type=float_tuple(2), help="lo,hi (default: -1,10.5)")
    p.set_defaults(build=build_conjecture)
