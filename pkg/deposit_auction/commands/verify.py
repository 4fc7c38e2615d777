"""``verify``: check a strategy profile for profitable deviations."""

import argparse
from typing import List

from deposit_auction.core.logging import get_logger
from deposit_auction.models.schemas import DeviationClass, RunConfig
from deposit_auction.services.profiles import build_profile
from deposit_auction.services.verify import verify_profile
from deposit_auction.utils.output import write_json

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction, parents: List[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "verify",
        parents=parents,
        help="Verify a profile; exit 0 iff no bidder gains more than eps",
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--mutate", metavar="scale=K", help="Multiply bidder 1's deposits by K")
    parser.add_argument("--deviations", choices=[d.value for d in DeviationClass], help="Bidder-1 deviation class")
    parser.add_argument("--type-grid", dest="type_grid", type=int, help="Types per check")
    parser.add_argument("--dev-grid", dest="dev_grid", type=int, help="Deviation grid size")
    parser.add_argument("--deposit-grid", dest="deposit_grid", type=int, help="Observed deposits checked for bidder 2")
    parser.set_defaults(handler=run)


def run(config: RunConfig) -> int:
    profile = build_profile(config)
    report = verify_profile(
        profile,
        type_grid=config.type_grid,
        dev_grid=config.dev_grid,
        deposit_grid=config.deposit_grid,
        eps=config.eps,
        deviations=config.deviations,
    )
    write_json(report, config.out)
    if not report.passed:
        logger.warning(
            "Profitable deviation found",
            extra={
                "profile": report.profile,
                "bidder1_max_gain": report.bidder1.max_gain,
                "bidder2_max_gain": report.bidder2.max_gain,
            },
        )
    return 0 if report.passed else 1
