"""``solve``: equilibrium curves and parameters."""

import argparse
import sys
from pathlib import Path
from typing import Dict, List

import numpy as np

from deposit_auction.core.config import settings
from deposit_auction.core.logging import get_logger
from deposit_auction.models.schemas import InequalityCheck, Regime, RunConfig, SolveSummary
from deposit_auction.services import sequential
from deposit_auction.services.profiles import (
    PoolingProfile,
    ScaledProfile,
    SimultaneousProfile,
    StrategyProfile,
    build_profile,
)
from deposit_auction.services.simultaneous import ode_residual
from deposit_auction.services.verify import deviation_scan
from deposit_auction.utils.output import write_csv, write_json

logger = get_logger(__name__)

RESIDUAL_TOLERANCE = 1e-6


def register(subparsers: argparse._SubParsersAction, parents: List[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "solve",
        parents=parents,
        help="Solve an equilibrium and emit its deposit and bid curves",
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--response", metavar="d1=X", help="Emit bidder 2's response v2,deposit to deposit X")
    parser.add_argument("--deviation-scan", dest="deviation_scan", metavar="v1=X", help="Emit d1,profit for type X")
    parser.add_argument("--points", type=int, help="Deposits in a deviation scan")
    parser.add_argument(
        "--summary",
        type=Path,
        help="Summary JSON file; stdout when the CSV goes to --out, stderr otherwise",
    )
    parser.set_defaults(handler=run)


def _sequential_residuals(config: RunConfig, profile: StrategyProfile) -> Dict[str, float]:
    """Largest |v(d(v)) − v| over the separating types."""
    span = profile.separating_range()
    if span is None or span[1] <= span[0]:
        return {"inverse_roundtrip": 0.0}
    grid = np.linspace(span[0], span[1], 102)[1:-1]
    if config.regime is Regime.SEQUENTIAL_SQRT:
        back = sequential.sqrt_inverse_type(config.cost, sequential.sqrt_bidder1_deposit(config.cost, grid))
    else:
        back = sequential.uniform_inverse_type(config.cost, sequential.uniform_bidder1_deposit(config.cost, grid))
    return {"inverse_roundtrip": float(np.max(np.abs(np.asarray(back) - grid)))}


def summarize(config: RunConfig, profile: StrategyProfile) -> SolveSummary:
    """Parameters, residuals and consistency of a solved profile."""
    base = profile.base if isinstance(profile, ScaledProfile) else profile
    summary = SolveSummary(regime=config.regime, dist=profile.dist.label, c=config.cost, parameters=profile.summary())

    if isinstance(base, SimultaneousProfile):
        grid = np.linspace(0.05, 0.95, 100)
        worst = float(np.max(np.abs(ode_residual(base.eq, grid))))
        summary.residuals = {"ode_max": worst}
        summary.consistent = worst < RESIDUAL_TOLERANCE
    elif isinstance(base, PoolingProfile):
        params = base.params
        summary.residuals = params.residuals()
        summary.inequality_check = InequalityCheck(
            value=params.incentive_value, bound=params.c, holds=params.inequality_holds
        )
        summary.consistent = (
            abs(params.identity_residual) < RESIDUAL_TOLERANCE
            and abs(params.zero_profit_residual) < RESIDUAL_TOLERANCE
            and params.inequality_holds
        )
    else:
        eq = sequential.solve_sequential(base.dist, config.cost)
        summary.parameters = {**eq.thresholds.model_dump(), **summary.parameters}
        summary.residuals = _sequential_residuals(config, base)
        summary.consistent = summary.residuals["inverse_roundtrip"] < RESIDUAL_TOLERANCE
    return summary


def run(config: RunConfig) -> int:
    profile = build_profile(config)

    if config.v1 is not None:
        points = deviation_scan(profile, config.v1, config.points, config.deviations)
        write_csv([[p.d1 for p in points], [p.profit for p in points]], ["d1", "profit"], config.out)
        return 0

    summary = summarize(config, profile)
    if config.response_d1 is not None:
        v2 = np.linspace(0.0, 1.0, settings.curve_points)
        deposits = np.asarray(profile.respond(np.full(v2.shape, config.response_d1), v2), dtype=float)
        write_csv([v2, deposits], ["v2", "deposit"], config.out)
    else:
        v = np.linspace(0.0, 1.0, settings.curve_points)
        write_csv([v, profile.deposit(v), profile.bid(v)], ["v", "deposit", "bid"], config.out)

    # stdout belongs to the CSV unless it went to a file
    write_json(summary, config.summary, None if config.out is not None else sys.stderr)
    logger.info(
        "Solved equilibrium",
        extra={"regime": config.regime.value, "c": config.cost, "consistent": summary.consistent},
    )
    return 0
