"""
`trace` and `bifurcations` subcommands.
"""

import argparse

from .options import direction, without_none


def build_trace(args: argparse.Namespace) -> dict:
    return without_none(
        command="trace",
        anchor_lambda=args.anchor_lambda,
        anchor_index=args.anchor_index,
        direction=args.direction,
        bound=args.bound,
        step=args.step,
    )


def build_bifurcations(args: argparse.Namespace) -> dict:
    return {"command": "bifurcations", "lambda_star": args.lambda_star}


def register(subparsers, common: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("trace", parents=[common], help="follow a branch from a trivial solution")
    p.add_argument("--anchor-lambda", type=float, required=True, help="eigenvalue the branch starts at")
    p.add_argument("--anchor-index", type=int, default=0, help="which eigensphere grid point (default: 0)")
    p.add_argument("--direction", type=direction, default=1, help="+1 or -1 (default: +1)")
    p.add_argument("--bound", type=float, help="box radius R (default: continuation.bound)")
    p.add_argument("--step", type=float, help="initial arclength step")
    p.set_defaults(build=build_trace)

    p = subparsers.add_parser("bifurcations", parents=[common], help="bifurcation points on an eigensphere")
    p.add_argument("--lambda-star", type=float, required=True)
    p.set_defaults(build=build_bifurcations)
