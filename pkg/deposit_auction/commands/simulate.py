"""``simulate``: Monte Carlo outcome metrics."""

import argparse
from typing import List

from deposit_auction.models.schemas import RunConfig
from deposit_auction.services.profiles import build_profile
from deposit_auction.services.sim import monte_carlo
from deposit_auction.utils.output import write_json


def register(subparsers: argparse._SubParsersAction, parents: List[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "simulate",
        parents=parents,
        help="Simulate i.i.d. auctions and report welfare, revenue and misallocation",
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--n", type=int, help="Number of valuation pairs")
    parser.add_argument("--mutate", metavar="scale=K", help="Multiply bidder 1's deposits by K")
    parser.set_defaults(handler=run)


def run(config: RunConfig) -> int:
    profile = build_profile(config)
    write_json(monte_carlo(profile, config.n, config.seed), config.out)
    return 0
