"""Perfect Bayesian Equilibrium checks for strategy profiles.

Bidder 1 is checked by scanning deposits on [0, d̄] against bidder 2's
equilibrium response to each deposit. Bidder 2 is checked by scanning
its own deposits against the belief the profile assigns to each observed
deposit. Beliefs are checked against Bayes' rule on the equilibrium path.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from deposit_auction.core.config import settings
from deposit_auction.core.logging import get_logger
from deposit_auction.models.schemas import (
    BeliefCheck,
    Bidder1Check,
    Bidder2Check,
    DeviationClass,
    PoolResidual,
    ScanPoint,
    VerificationReport,
)
from deposit_auction.services import pooling
from deposit_auction.services.beliefs import Belief, PointMass, TruncatedPrior
from deposit_auction.services.numerics import RootBracket, find_root, maximize_1d
from deposit_auction.services.profiles import PoolingProfile, StrategyProfile

logger = get_logger(__name__)

BELIEF_TOLERANCE = 1e-8


def _type_grid(n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Cell midpoints, so neither end of [lo, hi] is sampled."""
    return lo + (hi - lo) * (np.arange(n) + 0.5) / n


def bidder1_expected_payoff(
    profile: StrategyProfile,
    v1: float,
    d1: float,
    deviations: DeviationClass = DeviationClass.MIMIC,
    b1: Optional[float] = None,
) -> float:
    """Expected profit of type v1 depositing d1 against bidder 2's response.

    Bidder 1 wins when its bid is positive and bidder 2 either stays out or
    bids less; it then pays bidder 2's bid. The integral over v2 splits at
    the profile's entry thresholds.

    Args:
        profile: Strategy profile supplying responses.
        v1: Bidder 1's valuation.
        d1: Deposit, in [0, d̄].
        deviations: Deviation class fixing the bid paired with d1.
        b1: Explicit bid, overriding the deviation class.
    """
    if b1 is None:
        b1 = profile.deviation_bid(v1, d1, deviations)
    cost = profile.c * d1
    if b1 <= 0.0:
        return -cost

    upper = profile.win_threshold(d1, b1)
    if upper <= 0.0:
        return -cost

    paid = profile.expected_payment(d1, upper)
    return float(v1 * profile.dist.cdf(upper) - paid - cost)


def bidder2_expected_payoff(
    belief: Belief,
    c: float,
    v2: float,
    d1: float,
    d2: float,
    believed_bid: Optional[Callable[[float], float]] = None,
) -> float:
    """Expected profit of bidder 2 bidding d2 given its belief about v1.

    Bidder 2 wins when d2 ≥ b1(v1) and then pays b1(v1). The believed bid
    defaults to min{v1, d1} and must be nondecreasing in v1.
    """
    bid = believed_bid or (lambda v1: min(v1, d1))
    cost = c * d2

    if isinstance(belief, PointMass):
        b1 = bid(belief.location)
        return (v2 - b1 if d2 >= b1 else 0.0) - cost

    lo, hi = belief.lo, belief.hi
    if bid(lo) > d2:
        return -cost
    if bid(hi) <= d2:
        top = hi
    else:
        top = find_root(lambda v1: 1.0 if bid(v1) <= d2 else -1.0, RootBracket(lo=lo, hi=hi, tol=1e-13))
    points = [d1] if lo < d1 < top else None
    return belief.integrate(lambda v1: v2 - bid(v1), lo, top, points) - cost


def check_bidder1(
    profile: StrategyProfile,
    type_grid: int = settings.type_grid,
    dev_grid: int = settings.dev_grid,
    eps: float = settings.eps,
    deviations: DeviationClass = DeviationClass.MIMIC,
    types: Optional[Sequence[float]] = None,
) -> Bidder1Check:
    """Largest gain of each bidder-1 type from deviating to another deposit."""
    grid = np.asarray(types, dtype=float) if types is not None else _type_grid(type_grid)
    extra = profile.candidate_deposits()

    def evaluate(index: int) -> Tuple[float, float]:
        v1 = float(grid[index])
        d_on = float(profile.deposit(v1))
        on_path = bidder1_expected_payoff(profile, v1, d_on, b1=float(profile.bid(v1)))

        def payoff(d1: float) -> float:
            return bidder1_expected_payoff(profile, v1, d1, deviations)

        best = maximize_1d(payoff, 0.0, profile.dbar, grid_n=dev_grid)
        for d1 in extra:
            value = payoff(d1)
            if value > best.value:
                best = best._replace(argmax=d1, value=value)
        return max(0.0, best.value - on_path), best.argmax

    with ThreadPoolExecutor(max_workers=settings.max_workers) as pool:
        results = list(pool.map(evaluate, range(grid.size)))

    gains = [g for g, _ in results]
    k = int(np.argmax(gains))
    return Bidder1Check(
        deviations=deviations,
        types=grid.tolist(),
        gains=gains,
        best_deposits=[d for _, d in results],
        max_gain=gains[k],
        worst_type=float(grid[k]),
        passed=gains[k] <= eps,
    )


def _observed_deposits(profile: StrategyProfile, deposit_grid: int) -> List[float]:
    on_path = np.asarray(profile.deposit(_type_grid(deposit_grid)), dtype=float)
    off_path = np.linspace(0.0, profile.dbar, deposit_grid)
    values = np.concatenate([on_path, off_path, profile.candidate_deposits()])
    return sorted({round(float(d), 12) for d in values})


def check_bidder2(
    profile: StrategyProfile,
    deposit_grid: int = settings.deposit_grid,
    dev_grid: int = settings.dev_grid,
    eps: float = settings.eps,
) -> Bidder2Check:
    """Largest gain of bidder 2 from changing its deposit, per observed d1 and v2.

    Deposits checked are the equilibrium deposits of ``deposit_grid`` types,
    an even grid on [0, d̄] and the profile's candidate deposits.
    """
    # responses and beliefs ignore d1 when deposits are unobserved
    deposits = _observed_deposits(profile, deposit_grid) if profile.observes_deposit else [0.0]
    types = _type_grid(deposit_grid)
    grid_n = max(16, dev_grid // 4)

    def evaluate(row: int) -> List[float]:
        d1 = deposits[row]
        belief = profile.belief(d1)
        cap = profile.bidder2_cap(d1)

        def believed(v1: float) -> float:
            return profile.believed_bid(v1, d1)

        gains = []
        for v2 in types:
            v2 = float(v2)

            def payoff(d2: float) -> float:
                return bidder2_expected_payoff(belief, profile.c, v2, d1, d2, believed)

            response = float(profile.respond(d1, v2))
            on_path = payoff(response)
            best = maximize_1d(payoff, 0.0, cap, grid_n=grid_n).value if cap > 0 else payoff(0.0)
            candidates = [0.0, cap]
            if isinstance(belief, PointMass):
                candidates.append(believed(belief.location))
            for d2 in candidates:
                if 0.0 <= d2 <= cap:
                    best = max(best, payoff(d2))
            gains.append(max(0.0, best - on_path))
        return gains

    with ThreadPoolExecutor(max_workers=settings.max_workers) as pool:
        rows = list(pool.map(evaluate, range(len(deposits))))

    matrix = np.asarray(rows)
    i, j = np.unravel_index(int(np.argmax(matrix)), matrix.shape)
    max_gain = float(matrix[i, j])
    return Bidder2Check(
        deposits=deposits,
        types=types.tolist(),
        gains=matrix.tolist(),
        max_gain=max_gain,
        worst_deposit=deposits[i],
        worst_type=float(types[j]),
        passed=max_gain <= eps,
    )


def _cdf_gap(belief: Belief, reference: TruncatedPrior, quantiles: int = 20) -> float:
    xs = reference.lo + (reference.hi - reference.lo) * (np.arange(quantiles) + 0.5) / quantiles
    return float(np.max(np.abs(np.asarray(belief.cdf(xs)) - np.asarray(reference.cdf(xs)))))


def check_bayes_consistency(profile: StrategyProfile, sample_n: int = 50) -> BeliefCheck:
    """Compare on-path beliefs with Bayes' rule applied to bidder 1's deposits."""
    separating = 0.0
    span = profile.separating_range()
    if span is not None:
        for v in _type_grid(sample_n, *span):
            belief = profile.belief(float(profile.deposit(v)))
            if isinstance(belief, PointMass):
                separating = max(separating, abs(belief.location - float(v)))
            else:
                separating = 1.0

    pools = []
    for pool in profile.pools():
        reference = TruncatedPrior(dist=profile.dist, lo=pool.lo, hi=pool.hi)
        gap = _cdf_gap(profile.belief(pool.deposit), reference)
        pools.append(PoolResidual(deposit=pool.deposit, lo=pool.lo, hi=pool.hi, max_cdf_gap=gap))

    prior = 0.0
    if not profile.observes_deposit:
        reference = TruncatedPrior(dist=profile.dist, lo=0.0, hi=1.0)
        for v in _type_grid(sample_n):
            prior = max(prior, _cdf_gap(profile.belief(float(profile.deposit(v))), reference))

    worst = max([separating, prior] + [p.max_cdf_gap for p in pools])
    return BeliefCheck(
        separating_residual=separating,
        pools=pools,
        prior_residual=prior,
        max_residual=worst,
        consistent=worst <= BELIEF_TOLERANCE,
    )


def verify_profile(
    profile: StrategyProfile,
    type_grid: int = settings.type_grid,
    dev_grid: int = settings.dev_grid,
    deposit_grid: int = settings.deposit_grid,
    eps: float = settings.eps,
    deviations: DeviationClass = DeviationClass.MIMIC,
) -> VerificationReport:
    """Run all three checks and assemble a report."""
    started = time.perf_counter()
    first = check_bidder1(profile, type_grid, dev_grid, eps, deviations)
    second = check_bidder2(profile, deposit_grid, dev_grid, eps)
    beliefs = check_bayes_consistency(profile)
    report = VerificationReport(
        profile=profile.name,
        dist=profile.dist.label,
        c=profile.c,
        eps=eps,
        bidder1=first,
        bidder2=second,
        beliefs=beliefs,
        passed=first.passed and second.passed,
    )
    logger.info(
        "Verified strategy profile",
        extra={
            "profile": profile.name,
            "bidder1_max_gain": first.max_gain,
            "bidder2_max_gain": second.max_gain,
            "belief_residual": beliefs.max_residual,
            "passed": report.passed,
            "elapsed_s": round(time.perf_counter() - started, 3),
        },
    )
    return report


def deviation_scan(
    profile: StrategyProfile,
    v1: float,
    points: int = 201,
    deviations: DeviationClass = DeviationClass.MIMIC,
) -> List[ScanPoint]:
    """Profit of type v1 across deposits; (u, d̄] for the pooling profile."""
    if isinstance(profile, PoolingProfile):
        params = profile.params
        grid = np.linspace(params.u, profile.dbar, points + 1)[1:]
        return [ScanPoint(d1=float(d), profit=pooling.bidder1_deviation_profit(params, v1, float(d))) for d in grid]
    grid = np.linspace(0.0, profile.dbar, points)
    return [ScanPoint(d1=float(d), profit=bidder1_expected_payoff(profile, v1, float(d), deviations)) for d in grid]
