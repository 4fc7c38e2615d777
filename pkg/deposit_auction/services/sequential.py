"""Closed-form sequential equilibria: square-root separating, uniform conditional on entry.

Bidder 1 moves first and its deposit d1 is public. Bidder 2 then sees
d1, forms a belief about v1 and responds with a deposit that doubles as
its bid. With b1 = min{v1, d1}, a bidder-2 type that expects to pay
price p enters iff v2 − p − c·p ≥ 0, i.e. v2 ≥ (1 + c)·p.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from deposit_auction.core.exceptions import OutOfRangeError
from deposit_auction.services.dist import ArrayLike, ValuationDistribution
from deposit_auction.services.beliefs import Belief, PointMass, TruncatedPrior

# slack for deposits that equal the top level up to rounding
RANGE_TOL = 1e-9


class SequentialThresholds(BaseModel):
    """Type and deposit levels that separate the branches of bidder 1's rule."""

    model_config = ConfigDict(frozen=True)

    entry: float = Field(..., description="Lowest type that deposits a positive amount")
    switch: float = Field(..., description="Type where under-depositing turns into over-depositing")
    pool: float = Field(..., description="Lowest type of the pool at the top deposit")
    top_deposit: float = Field(..., description="Deposit posted by the top pool")


class SequentialEquilibrium(BaseModel):
    """A solved sequential equilibrium for one of the two closed-form presets."""

    model_config = ConfigDict(frozen=True)

    c: float = Field(..., gt=0, description="Marginal deposit cost")
    dist: ValuationDistribution = Field(..., description="Valuation prior")
    regime: str = Field(..., description="separating | conditional-on-entry")
    thresholds: SequentialThresholds


def _arr(x: ArrayLike) -> np.ndarray:
    return np.asarray(x, dtype=float)


# Square-root prior -----------------------------------------------------------


def sqrt_thresholds(c: float) -> SequentialThresholds:
    switch = 4.0 * c * c / (1.0 + c)
    pool = 1.0 / (1.0 + c)
    if switch >= 1.0:
        top = (1.0 + c) / (4.0 * c * c)
        return SequentialThresholds(entry=0.0, switch=1.0, pool=1.0, top_deposit=top)
    top = (1.0 + 4.0 * c**3) / (3.0 * c * (1.0 + c))
    return SequentialThresholds(entry=0.0, switch=switch, pool=pool, top_deposit=top)


def sqrt_bidder1_deposit(c: float, v1: ArrayLike) -> ArrayLike:
    """Three-branch deposit rule for the square-root prior.

    Under-deposit (1+c)v²/(4c²) below 4c²/(1+c), over-deposit
    (((1+c)v)^{3/2} + 4c³)/(3c(1+c)) up to 1/(1+c), constant above. If
    4c²/(1+c) ≥ 1 the low branch applies everywhere.
    """
    v = _arr(v1)
    th = sqrt_thresholds(c)
    low = (1.0 + c) * v * v / (4.0 * c * c)
    if th.switch >= 1.0:
        return low[()]
    vm = np.minimum(v, th.pool)
    middle = (((1.0 + c) * vm) ** 1.5 + 4.0 * c**3) / (3.0 * c * (1.0 + c))
    out = np.where(v < th.switch, low, np.where(v < th.pool, middle, th.top_deposit))
    return out[()]


def sqrt_bidder1_bid(c: float, v1: ArrayLike) -> ArrayLike:
    v = _arr(v1)
    return np.minimum(v, sqrt_bidder1_deposit(c, v))[()]


def sqrt_inverse_type(c: float, d1: ArrayLike) -> ArrayLike:
    """Type that posts deposit d1 on the separating range.

    Raises:
        OutOfRangeError: Above the top deposit.
    """
    d = _arr(d1)
    th = sqrt_thresholds(c)
    if np.any(d > th.top_deposit + RANGE_TOL) or np.any(d < 0):
        raise OutOfRangeError(
            "Deposit lies outside the separating range",
            details={"top_deposit": th.top_deposit, "d1": d.tolist()},
        )
    d = np.minimum(d, th.top_deposit)
    low = np.sqrt(4.0 * c * c * d / (1.0 + c))
    if th.switch >= 1.0:
        return np.minimum(low, 1.0)[()]
    inner = np.maximum(3.0 * c * (1.0 + c) * d - 4.0 * c**3, 0.0)
    middle = np.minimum(inner ** (2.0 / 3.0) / (1.0 + c), th.pool)
    return np.where(d < th.switch, low, middle)[()]


def sqrt_bidder2_response(c: float, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
    """Bidder 2's deposit after seeing d1 under the square-root separating equilibrium.

    On the separating range bidder 2 expects to pay p = min{d1, v(d1)} and
    deposits p iff v2 ≥ (1+c)p. Above the top deposit the belief is the
    prior on [1/(1+c), 1], against which no type enters.
    """
    d = _arr(d1)
    v = _arr(v2)
    th = sqrt_thresholds(c)
    # the top pool is never challenged
    on_range = d < th.top_deposit - RANGE_TOL
    vstar = sqrt_inverse_type(c, np.minimum(d, th.top_deposit))
    price = np.minimum(d, vstar)
    enters = on_range & (v >= (1.0 + c) * price)
    return np.where(enters, price, 0.0)[()]


# Uniform prior -----------------------------------------------------------------


def uniform_thresholds(c: float) -> SequentialThresholds:
    entry = c / (1.0 + c)
    pool = 1.0 / (1.0 + c)
    top = (1.0 + c * c) / (2.0 * c * (1.0 + c))
    return SequentialThresholds(entry=entry, switch=entry, pool=pool, top_deposit=top)


def uniform_bidder1_deposit(c: float, v1: ArrayLike) -> ArrayLike:
    """Zero below c/(1+c), (1+c)v²/(2c) + c/(2(1+c)) up to 1/(1+c), constant above."""
    v = _arr(v1)
    th = uniform_thresholds(c)
    vm = np.minimum(v, th.pool)
    middle = (1.0 + c) * vm * vm / (2.0 * c) + c / (2.0 * (1.0 + c))
    out = np.where(v < th.entry, 0.0, np.where(v < th.pool, middle, th.top_deposit))
    return out[()]


def uniform_bidder1_bid(c: float, v1: ArrayLike) -> ArrayLike:
    v = _arr(v1)
    return np.minimum(v, uniform_bidder1_deposit(c, v))[()]


def uniform_inverse_type(c: float, d1: ArrayLike) -> ArrayLike:
    """Type that posts d1 on [c/(1+c), top deposit]."""
    d = _arr(d1)
    th = uniform_thresholds(c)
    if np.any(d > th.top_deposit + RANGE_TOL) or np.any(d < th.entry - RANGE_TOL):
        raise OutOfRangeError(
            "Deposit lies outside the separating range",
            details={"entry": th.entry, "top_deposit": th.top_deposit, "d1": d.tolist()},
        )
    inner = 2.0 * c * d / (1.0 + c) - c * c / (1.0 + c) ** 2
    return np.clip(np.sqrt(np.maximum(inner, 0.0)), th.entry, th.pool)[()]


def uniform_bidder2_response(c: float, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
    """Bidder 2's deposit under the uniform conditional-on-entry equilibrium.

    d1 = 0 signals a non-entering type; bidder 2 deposits 0 and wins at
    price 0. Low off-path deposits are matched at d1 iff v2 ≥ (1+c)d1,
    separating deposits are matched at v(d1) iff v2 ≥ (1+c)v(d1), and no
    type enters above the top deposit.
    """
    d = _arr(d1)
    v = _arr(v2)
    th = uniform_thresholds(c)
    d_on = np.clip(d, th.entry, th.top_deposit)
    vstar = uniform_inverse_type(c, d_on)
    price = np.where(d <= th.entry, d, vstar)
    enters = (d < th.top_deposit - RANGE_TOL) & (v >= (1.0 + c) * price)
    return np.where(enters, price, 0.0)[()]


def belief_rule(regime: str, c: float, d1: float) -> Belief:
    """Bidder 2's belief about v1 after observing deposit d1.

    Args:
        regime: ``sequential-sqrt`` or ``sequential-uniform``.
        c: Marginal deposit cost.
        d1: Observed deposit.
    """
    if regime == "sequential-sqrt":
        dist = ValuationDistribution.sqrt()
        th = sqrt_thresholds(c)
        if d1 >= th.top_deposit - RANGE_TOL and th.pool < 1.0:
            return TruncatedPrior(dist=dist, lo=th.pool, hi=1.0)
        # no top pool once 4c²/(1+c) ≥ 1; the top deposit then reveals v1 = 1
        if d1 > th.top_deposit:
            return PointMass(location=1.0)
        return PointMass(location=float(sqrt_inverse_type(c, d1)))

    if regime == "sequential-uniform":
        dist = ValuationDistribution.uniform()
        th = uniform_thresholds(c)
        if d1 == 0.0:
            return TruncatedPrior(dist=dist, lo=0.0, hi=th.entry)
        if d1 <= th.entry:
            return PointMass(location=th.entry)
        if d1 >= th.top_deposit - RANGE_TOL:
            return TruncatedPrior(dist=dist, lo=th.pool, hi=1.0)
        return PointMass(location=float(uniform_inverse_type(c, d1)))

    raise ValueError(f"No closed-form belief rule for regime {regime!r}")


def solve_sequential(dist: ValuationDistribution, c: float) -> SequentialEquilibrium:
    """Thresholds of the closed-form equilibrium for the sqrt or uniform prior."""
    if dist.alpha == 0.5:
        return SequentialEquilibrium(c=c, dist=dist, regime="separating", thresholds=sqrt_thresholds(c))
    if dist.alpha == 1.0:
        return SequentialEquilibrium(
            c=c, dist=dist, regime="conditional-on-entry", thresholds=uniform_thresholds(c)
        )
    raise OutOfRangeError(
        "Sequential equilibria are available for the sqrt and uniform priors only",
        details={"dist": dist.label},
    )
