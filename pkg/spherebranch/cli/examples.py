"""
`example` subcommand: the diagonal examples T_k x + sN(x) = λCx.
"""

import argparse


def build_example(args: argparse.Namespace) -> dict:
    return {"command": "example", "name": args.name, "n": args.n}


def register(subparsers, common: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("example", parents=[common], help="run every pipeline on example k1, k2 or k3")
    p.add_argument("name", choices=["k1", "k2", "k3"])
    p.add_argument("--n", type=int, default=16, help="truncation dimension (default: 16)")
    p.set_defaults(build=build_example)
