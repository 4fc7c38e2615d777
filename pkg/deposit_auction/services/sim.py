"""Monte Carlo evaluation of strategy profiles.

Draws are generated in fixed-size blocks, block k seeded with
SeedSequence(seed, spawn_key=(k,)), so results do not depend on how
blocks are spread over workers.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Optional, Tuple

import numpy as np

from deposit_auction.core.config import settings
from deposit_auction.core.exceptions import DomainError
from deposit_auction.core.logging import get_logger
from deposit_auction.models.schemas import AuctionOutcome, DeviationClass, MonteCarloMetrics, Winner
from deposit_auction.services.numerics import integrate
from deposit_auction.services.profiles import TIE_TOL, StrategyProfile

logger = get_logger(__name__)

BIDDER1, BIDDER2, NOBODY = 1, 2, 0

_SUM_FIELDS = ("misallocated", "unallocated", "welfare", "welfare_sq", "revenue", "deposit_cost", "waste", "entry1", "entry2")


def play(profile: StrategyProfile, v1: np.ndarray, v2: np.ndarray) -> Dict[str, np.ndarray]:
    """Vectorized second-price auctions with visible deposits.

    Bidder 2 wins when it bids and its bid is at least bidder 1's; a zero
    bid counts as a bid only after d1 = 0. Bidder 1 wins otherwise if its
    bid is positive. The winner pays the losing bid.
    """
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    c = profile.c

    d1 = np.asarray(profile.deposit(v1), dtype=float)
    b1 = np.asarray(profile.bid(v1), dtype=float)
    d2 = np.asarray(profile.respond(d1, v2), dtype=float)
    b2 = d2
    entered = np.asarray(profile.enters(d1, v2), dtype=bool)

    two = entered & (b2 >= b1 - TIE_TOL)
    one = ~two & (b1 > 0.0)
    nobody = ~one & ~two

    winner = np.where(two, BIDDER2, np.where(one, BIDDER1, NOBODY))
    price = np.where(two, b1, np.where(one, b2, 0.0))
    payoff1 = np.where(one, v1 - price, 0.0) - c * d1
    payoff2 = np.where(two, v2 - price, 0.0) - c * d2
    welfare = np.where(one, v1, 0.0) + np.where(two, v2, 0.0) - c * (d1 + d2)
    misallocated = (one & (v1 < v2)) | (two & (v2 < v1)) | (nobody & ((v1 > 0.0) | (v2 > 0.0)))

    return {
        "v1": v1,
        "v2": v2,
        "d1": d1,
        "d2": d2,
        "b1": b1,
        "b2": b2,
        "winner": winner,
        "price": price,
        "payoff1": payoff1,
        "payoff2": payoff2,
        "welfare": welfare,
        "misallocated": misallocated,
        "unallocated": nobody,
        "entered1": d1 > 0.0,
        "entered2": d2 > 0.0,
    }


def run_auction(profile: StrategyProfile, v1: float, v2: float) -> AuctionOutcome:
    """Play one auction between types v1 and v2."""
    if not (0.0 <= v1 <= 1.0 and 0.0 <= v2 <= 1.0):
        raise DomainError("Valuations must lie in [0, 1]", details={"v1": v1, "v2": v2})
    out = play(profile, np.array([v1]), np.array([v2]))
    winner = {BIDDER1: Winner.BIDDER1, BIDDER2: Winner.BIDDER2, NOBODY: Winner.NONE}[int(out["winner"][0])]
    return AuctionOutcome(
        v1=v1,
        v2=v2,
        d1=float(out["d1"][0]),
        d2=float(out["d2"][0]),
        b1=float(out["b1"][0]),
        b2=float(out["b2"][0]),
        winner=winner,
        price=float(out["price"][0]),
        payoff1=float(out["payoff1"][0]),
        payoff2=float(out["payoff2"][0]),
        welfare=float(out["welfare"][0]),
    )


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def _block_sums(profile: StrategyProfile, seed: int, block: int, size: int) -> Dict[str, float]:
    rng = _block_rng(seed, block)
    values = profile.dist.sample(rng, (size, 2))
    out = play(profile, values[:, 0], values[:, 1])
    c = profile.c
    return {
        "misallocated": float(np.count_nonzero(out["misallocated"])),
        "unallocated": float(np.count_nonzero(out["unallocated"] & ((out["v1"] > 0) | (out["v2"] > 0)))),
        "welfare": float(np.sum(out["welfare"])),
        "welfare_sq": float(np.sum(out["welfare"] ** 2)),
        "revenue": float(np.sum(out["price"])),
        "deposit_cost": float(c * np.sum(out["d1"] + out["d2"])),
        "waste": float(c * np.sum((out["d1"] - out["b1"]) + (out["d2"] - out["b2"]))),
        "entry1": float(np.count_nonzero(out["entered1"])),
        "entry2": float(np.count_nonzero(out["entered2"])),
    }


def monte_carlo(
    profile: StrategyProfile,
    n: int,
    seed: int,
    block_size: int = settings.mc_block_size,
) -> MonteCarloMetrics:
    """Aggregate outcome statistics over n i.i.d. valuation pairs.

    Args:
        profile: Strategy profile to evaluate.
        n: Number of valuation pairs, at least 1.
        seed: Root seed.
        block_size: Draws per seeded block.

    Returns:
        MonteCarloMetrics, identical for identical (profile, n, seed, block_size).
    """
    if n < 1:
        raise DomainError("Monte Carlo needs at least one draw", details={"n": n})

    started = time.perf_counter()
    sizes = [min(block_size, n - start) for start in range(0, n, block_size)]
    with ThreadPoolExecutor(max_workers=settings.max_workers) as pool:
        blocks = list(pool.map(lambda k: _block_sums(profile, seed, k, sizes[k]), range(len(sizes))))

    totals = {key: math.fsum(block[key] for block in blocks) for key in _SUM_FIELDS}
    p = totals["misallocated"] / n
    mean_welfare = totals["welfare"] / n
    variance = max(totals["welfare_sq"] / n - mean_welfare**2, 0.0)

    metrics = MonteCarloMetrics(
        n=n,
        seed=seed,
        misallocation_prob=p,
        misallocation_stderr=math.sqrt(p * (1.0 - p) / n),
        unallocated_prob=totals["unallocated"] / n,
        expected_welfare=mean_welfare,
        welfare_stderr=math.sqrt(variance / n),
        expected_revenue=totals["revenue"] / n,
        expected_deposit_cost=totals["deposit_cost"] / n,
        expected_deposit_waste=totals["waste"] / n,
        bidder1_entry_rate=totals["entry1"] / n,
        bidder2_entry_rate=totals["entry2"] / n,
    )
    logger.info(
        "Monte Carlo finished",
        extra={
            "profile": profile.name,
            "n": n,
            "blocks": len(sizes),
            "misallocation_prob": p,
            "elapsed_s": round(time.perf_counter() - started, 3),
        },
    )
    return metrics


def misallocation_quadrature(profile: StrategyProfile, tol: float = 1e-9) -> float:
    """Probability that the item goes to the lower valuation, or to no one.

    For each v1 bidder 2 wins exactly when v2 ≥ v2*(v1), so the misallocated
    mass at v1 is |F(v1) − F(v2*(v1))|.
    """
    dist = profile.dist

    def integrand(v1: float) -> float:
        d1 = float(profile.deposit(v1))
        b1 = float(profile.bid(v1))
        cutoff = profile.win_threshold(d1, b1)
        return float(dist.pdf(v1)) * abs(float(dist.cdf(v1)) - float(dist.cdf(cutoff)))

    result = integrate(integrand, 0.0, 1.0, tol=tol, points=profile.type_breakpoints(), limit=500)
    return result.value


def payoff_monte_carlo(
    profile: StrategyProfile,
    v1: float,
    d1: float,
    n: int,
    seed: int,
    deviations: DeviationClass = DeviationClass.MIMIC,
    b1: Optional[float] = None,
) -> Tuple[float, float]:
    """Sample mean and standard error of bidder 1's profit from depositing d1."""
    if b1 is None:
        b1 = profile.deviation_bid(v1, d1, deviations)
    v2 = profile.dist.sample(_block_rng(seed, 0), n)
    d1_arr = np.full(n, d1)
    b2 = np.asarray(profile.respond(d1_arr, v2), dtype=float)
    entered = np.asarray(profile.enters(d1_arr, v2), dtype=bool)
    wins = ~(entered & (b2 >= b1 - TIE_TOL)) & (b1 > 0.0)
    profit = np.where(wins, v1 - b2, 0.0) - profile.c * d1
    return float(np.mean(profit)), float(np.std(profit, ddof=1) / math.sqrt(n))
