"""Two-level pooling equilibrium for the quadratic prior F(x) = x².

Bidder 1 deposits 0 below the marginal type u and 1 above it, bidding
its valuation. After d1 > u bidder 2 believes v1 ~ F(· | u ≤ v1 ≤ D1),
D1 = min{1, d1}, and after d1 ≤ u it believes v1 ~ F(· | d1 ≤ v1 ≤ u).
Against d1 > u a bidder-2 type v2 that deposits d2 ∈ [u, D1] earns

    Π(v2, d1, d2) = [(d2² − u²)·v2 − (2/3)(d2³ − u³)] / (D1² − u²) − c·d2.
"""

import math
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from deposit_auction.core.config import settings
from deposit_auction.core.exceptions import (
    DiscriminantError,
    DomainError,
    InequalityViolatedError,
    NoSignChangeError,
    NoSolutionError,
)
from deposit_auction.core.logging import get_logger
from deposit_auction.services.dist import ArrayLike, ValuationDistribution
from deposit_auction.services.numerics import RootBracket, find_root, integrate

logger = get_logger(__name__)

QUADRATIC = ValuationDistribution.quadratic()


class PoolingParams(BaseModel):
    """Marginal types of the pooling equilibrium."""

    model_config = ConfigDict(frozen=True)

    c: float = Field(..., gt=0, description="Marginal deposit cost")
    u: float = Field(..., gt=0, lt=1, description="Bidder 1's marginal type")
    v: float = Field(..., gt=0, le=1, description="Bidder 2's entry threshold after d1 = 1")
    dbar: float = Field(default=settings.dbar, ge=1.0, description="Maximum deposit")

    @property
    def identity_residual(self) -> float:
        """u·v² − c; zero when the marginal type is indifferent."""
        return self.u * self.v**2 - self.c

    @property
    def zero_profit_residual(self) -> float:
        """Bidder 2's maximized profit at v2 = v after d1 = 1."""
        return _max_profit(self.c, self.u, self.v, 1.0)

    @property
    def incentive_value(self) -> float:
        """(u(1+c))², which must not exceed c."""
        return (self.u * (1.0 + self.c)) ** 2

    @property
    def inequality_holds(self) -> bool:
        return self.incentive_value <= self.c

    def residuals(self) -> Dict[str, float]:
        return {
            "identity": self.identity_residual,
            "zero_profit": self.zero_profit_residual,
            "inequality_margin": self.c - self.incentive_value,
        }

    @classmethod
    def from_marginal_type(cls, c: float, u: float, dbar: float = settings.dbar) -> "PoolingParams":
        """Params for a given u, with v from the indifference identity u·v² = c.

        The result is not checked against bidder 2's zero-profit condition;
        inspect ``residuals()`` for that.
        """
        v = min(1.0, math.sqrt(c / u))
        return cls(c=c, u=u, v=v, dbar=dbar)


# Bidder 2 --------------------------------------------------------------------


def _profit(c: float, u: float, v2: float, d1: float, d2: float) -> float:
    big = min(1.0, d1)
    if d2 < u:
        return -c * d2
    d2c = min(d2, big)
    area = big * big - u * u
    return ((d2c * d2c - u * u) * v2 - (2.0 / 3.0) * (d2c**3 - u**3)) / area - c * d2


def _max_profit(c: float, u: float, v2: float, d1: float) -> float:
    """max over d2 in [u, D1] of Π; the larger FOC root is the local maximum."""
    big = min(1.0, d1)
    disc = v2 * v2 - 2.0 * c * (big * big - u * u)
    best = -c * u
    if disc >= 0.0:
        cand = min(big, 0.5 * (v2 + math.sqrt(disc)))
        if cand >= u:
            best = max(best, _profit(c, u, v2, d1, cand))
    return best


@lru_cache(maxsize=8192)
def _entry(c: float, u: float, d1: float) -> Tuple[float, bool]:
    big = min(1.0, d1)
    if _max_profit(c, u, 1.0, big) < 0.0:
        return 1.0, False
    root = find_root(lambda v2: _max_profit(c, u, v2, big), RootBracket(lo=0.0, hi=1.0, tol=1e-13))
    return root, True


def interior_profit(params: PoolingParams, v2: float, d1: float, d2: float) -> float:
    """Π(v2, d1, d2) for d1 > u, including the d2 < u and d2 > D1 cases."""
    if d1 <= params.u:
        raise DomainError("Interior profit needs d1 > u", details={"d1": d1, "u": params.u})
    return _profit(params.c, params.u, v2, d1, d2)


def bidder2_interior_deposit(params: PoolingParams, d1: float, v2: float) -> float:
    """Larger root of the first-order condition, clipped at min{1, d1}.

    Raises:
        DiscriminantError: If v2² < 2c(D1² − u²).
    """
    if d1 <= params.u:
        raise DomainError("Interior deposit needs d1 > u", details={"d1": d1, "u": params.u})
    big = min(1.0, d1)
    disc = v2 * v2 - 2.0 * params.c * (big * big - params.u**2)
    if disc < 0.0:
        raise DiscriminantError(
            "No interior deposit for this valuation",
            details={"v2": v2, "d1": d1, "discriminant": disc},
        )
    return min(big, 0.5 * (v2 + math.sqrt(disc)))


def entry_threshold(params: PoolingParams, d1: float) -> float:
    """Smallest v2 whose maximized profit after d1 is nonnegative; 1 if none."""
    if d1 <= params.u:
        raise DomainError("Entry threshold needs d1 > u", details={"d1": d1, "u": params.u})
    return _entry(params.c, params.u, float(min(1.0, d1)))[0]


def loss_bound(params: PoolingParams, d1: float, b1: float) -> float:
    """Smallest v2 at which bidder 2 outbids b1 after d1 > u, capped at 1.

    Solving ½(v2 + √(v2² − K)) = b with K = 2c(D1² − u²) gives
    v2 = b + K/(4b).
    """
    big = min(1.0, d1)
    threshold, anyone = _entry(params.c, params.u, float(big))
    if not anyone or b1 > big:
        return 1.0
    k = 2.0 * params.c * (big * big - params.u**2)
    if b1 * b1 * 4.0 <= k:
        crossing = math.sqrt(k)
    else:
        crossing = b1 + k / (4.0 * b1)
    return min(1.0, max(threshold, crossing))


def bidder2_pooling_response(params: PoolingParams, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
    """Bidder 2's deposit (and bid) after observing d1.

    d1 = 0: deposit 0 and win for free. 0 < d1 ≤ u: match d1 iff
    v2 ≥ (1+c)d1. d1 > u: interior deposit iff v2 ≥ v(d1), else stay out.
    """
    d, v = np.broadcast_arrays(np.asarray(d1, dtype=float), np.asarray(v2, dtype=float))
    out = np.zeros(d.shape)
    c, u = params.c, params.u

    low = (d > 0.0) & (d <= u)
    out[low] = np.where(v[low] >= (1.0 + c) * d[low], d[low], 0.0)

    high = d > u
    for level in np.unique(np.minimum(d[high], 1.0)):
        mask = high & (np.minimum(d, 1.0) == level)
        threshold, anyone = _entry(c, u, float(level))
        if not anyone:
            continue
        vv = v[mask]
        disc = np.maximum(vv * vv - 2.0 * c * (level * level - u * u), 0.0)
        deposit = np.minimum(level, 0.5 * (vv + np.sqrt(disc)))
        out[mask] = np.where(vv >= threshold, deposit, 0.0)
    return out[()]


# Bidder 1 --------------------------------------------------------------------


def pooling_bidder1_deposit(params: PoolingParams, v1: ArrayLike) -> ArrayLike:
    return np.where(np.asarray(v1, dtype=float) >= params.u, 1.0, 0.0)[()]


def pooling_bidder1_bid(params: PoolingParams, v1: ArrayLike) -> ArrayLike:
    v = np.asarray(v1, dtype=float)
    return np.where(v >= params.u, v, 0.0)[()]


def bidder1_deviation_profit(params: PoolingParams, v1: float, d1: float) -> float:
    """Expected profit of type v1 depositing d1 ∈ (u, d̄] and bidding min{v1, d1}.

    Bidder 1 wins against every v2 below the loss bound; the payment is
    bidder 2's bid when it enters and 0 otherwise.
    """
    if not params.u < d1 <= params.dbar:
        raise DomainError("Deviation deposit must lie in (u, dbar]", details={"d1": d1, "u": params.u})
    b1 = min(v1, d1)
    upper = loss_bound(params, d1, b1)
    threshold = entry_threshold(params, d1)
    win = float(QUADRATIC.cdf(upper))

    paid = 0.0
    if upper > threshold:
        level = min(1.0, d1)
        paid = integrate(
            lambda v2: bidder2_interior_deposit(params, level, v2) * 2.0 * v2,
            threshold,
            upper,
        ).value
    return v1 * win - paid - params.c * d1


def top_type_profit(params: PoolingParams, d1: float) -> float:
    """Closed form of bidder1_deviation_profit for v1 = 1.

    With ub the loss bound and t = v(d1):
    ub² − (1/3)[ub³ − t³ + (ub² − K)^{3/2} − (t² − K)^{3/2}] − c·d1.
    """
    big = min(1.0, d1)
    k = 2.0 * params.c * (big * big - params.u**2)
    t = entry_threshold(params, d1)
    ub = loss_bound(params, d1, big)
    if ub <= t:
        return ub * ub - params.c * d1
    bracket = ub**3 - t**3 + max(ub * ub - k, 0.0) ** 1.5 - max(t * t - k, 0.0) ** 1.5
    return ub * ub - bracket / 3.0 - params.c * d1


def solve_marginal_types(c: float, dbar: float = settings.dbar) -> PoolingParams:
    """Solve u·v(u)² = c where v(u) is bidder 2's entry threshold after d1 = 1.

    The outer equation is scanned over u = 0.01, 0.02, ..., 0.99 for a sign
    change, then refined; the inner threshold is itself a root.

    Raises:
        NoSolutionError: If no sign change exists in the scanned range.
        InequalityViolatedError: If (u(1+c))² > c at the solution.
    """

    def outer(u: float) -> float:
        threshold, _ = _entry(c, u, 1.0)
        return u * threshold**2 - c

    grid = np.round(np.arange(0.01, 0.995, 0.01), 10)
    values = [outer(float(u)) for u in grid]
    bracket = None
    for lo, hi, g_lo, g_hi in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if g_lo == 0.0 or np.sign(g_lo) != np.sign(g_hi):
            bracket = RootBracket(lo=float(lo), hi=float(hi), tol=1e-14)
            break
    if bracket is None:
        raise NoSolutionError(
            "Marginal-type system has no sign change",
            details={"c": c, "scanned": [float(grid[0]), float(grid[-1])]},
        )

    try:
        u = find_root(outer, bracket)
    except NoSignChangeError as e:
        raise NoSolutionError(e.message, details={"c": c, **e.details}) from e

    v = _entry(c, u, 1.0)[0]
    params = PoolingParams(c=c, u=u, v=v, dbar=dbar)
    logger.info(
        "Solved pooling marginal types",
        extra={"c": c, "u": u, "v": v, "incentive_value": params.incentive_value},
    )
    if not params.inequality_holds:
        raise InequalityViolatedError(
            "Marginal type profits from a small deposit",
            details={"c": c, "u": u, "v": v, "incentive_value": params.incentive_value},
        )
    return params
