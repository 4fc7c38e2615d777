"""``deviation-scan``: bidder 1's profit across deposits for one type."""

import argparse
from typing import List

from deposit_auction.core.exceptions import ConfigurationError
from deposit_auction.models.schemas import DeviationClass, RunConfig
from deposit_auction.services.profiles import build_profile
from deposit_auction.services.verify import deviation_scan
from deposit_auction.utils.output import write_csv


def register(subparsers: argparse._SubParsersAction, parents: List[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "deviation-scan",
        parents=parents,
        help="Emit d1,profit for a bidder-1 type",
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--v1", type=float, help="Bidder-1 valuation")
    parser.add_argument("--points", type=int, help="Number of deposits")
    parser.add_argument("--deviations", choices=[d.value for d in DeviationClass], help="Bidder-1 deviation class")
    parser.set_defaults(handler=run)


def run(config: RunConfig) -> int:
    if config.v1 is None:
        raise ConfigurationError("deviation-scan needs --v1")
    profile = build_profile(config)
    points = deviation_scan(profile, config.v1, config.points, config.deviations)
    write_csv([[p.d1 for p in points], [p.profit for p in points]], ["d1", "profit"], config.out)
    return 0
