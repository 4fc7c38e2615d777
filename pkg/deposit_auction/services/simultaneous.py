"""Symmetric equilibrium when both bidders deposit simultaneously.

Differentiating bidder i's expected profit from reporting type w,
F(w)·v − ∫₀^w d(z) f(z) dz − c·d(w), and imposing w = v gives

    c·d'(v) = f(v)·(v − d(v)),  d(0) = 0,

which covers the uniform, quadratic and square-root cases alike. Bids
equal deposits in this regime.
"""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from deposit_auction.core.config import settings
from deposit_auction.core.exceptions import DomainError
from deposit_auction.core.logging import get_logger
from deposit_auction.services.dist import ArrayLike, ValuationDistribution
from deposit_auction.services.numerics import Curve, integrate, solve_ivp

logger = get_logger(__name__)


class SimultaneousEquilibrium(BaseModel):
    """Solved deposit function of the simultaneous regime."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    c: float = Field(..., gt=0, description="Marginal deposit cost")
    dist: ValuationDistribution = Field(..., description="Valuation prior")
    deposit_curve: Curve = Field(..., description="d(v) sampled on [0, 1]")
    closed_form: bool = Field(False, description="Whether knots come from the uniform closed form")

    def deposit(self, v: ArrayLike) -> ArrayLike:
        return eval_deposit(self, v)


def uniform_closed_form(c: float, v: ArrayLike) -> ArrayLike:
    """d(v) = v − c(1 − e^(−v/c)) for the uniform prior."""
    v = np.asarray(v, dtype=float)
    return (v - c * (-np.expm1(-v / c)))[()]


def _series_start(alpha: float, c: float, x: float) -> float:
    """Two-term expansion of d near 0 for a density singular at the origin."""
    a = alpha / (c * (alpha + 1.0))
    b = -alpha * a / (c * (2.0 * alpha + 1.0))
    return a * x ** (alpha + 1.0) + b * x ** (2.0 * alpha + 1.0)


def solve_simultaneous(
    dist: ValuationDistribution,
    c: float,
    step: float = settings.ode_step,
    use_closed_form: bool = True,
) -> SimultaneousEquilibrium:
    """Solve c·d' = f(v)(v − d) from d(0) = 0 on [0, 1].

    Args:
        dist: Valuation prior.
        c: Marginal deposit cost, positive.
        step: RK4 step.
        use_closed_form: Sample the exact solution for the uniform prior
            instead of integrating.

    Returns:
        SimultaneousEquilibrium with knots on a uniform grid.
    """
    if not c > 0:
        raise DomainError("Deposit cost must be positive", details={"c": c})

    alpha = dist.alpha
    if use_closed_form and alpha == 1.0:
        n = max(1, math.ceil(1.0 / step - 1e-9))
        xs = np.linspace(0.0, 1.0, n + 1)
        curve = Curve(xs, uniform_closed_form(c, xs))
        return SimultaneousEquilibrium(c=c, dist=dist, deposit_curve=curve, closed_form=True)

    def rhs(x: float, y: float) -> float:
        density = alpha if alpha == 1.0 else alpha * x ** (alpha - 1.0)
        return density * (x - y) / c

    if dist.singular_at_zero:
        x0 = step
        y0 = _series_start(alpha, c, x0)
    else:
        x0, y0 = 0.0, 0.0

    curve = solve_ivp(rhs, x0, y0, 1.0, step)

    if x0 > 0:
        # series values below the first RK4 knot keep d(0) = 0
        head = np.linspace(0.0, x0, 17)[:-1]
        head_y = np.array([_series_start(alpha, c, x) for x in head])
        curve = Curve(np.concatenate([head, curve.x]), np.concatenate([head_y, curve.y]))

    logger.info(
        "Solved simultaneous deposit ODE",
        extra={"dist": dist.label, "c": c, "step": step, "d_at_1": float(curve.y[-1])},
    )
    return SimultaneousEquilibrium(c=c, dist=dist, deposit_curve=curve)


def eval_deposit(eq: SimultaneousEquilibrium, v: ArrayLike) -> ArrayLike:
    """Interpolated equilibrium deposit (and bid) at type v."""
    arr = np.asarray(v, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("Type must lie in [0, 1]", details={"v": arr.tolist()})
    return eq.deposit_curve(arr)


def ode_residual(eq: SimultaneousEquilibrium, v: ArrayLike) -> ArrayLike:
    """f(v)(v − d(v)) − c·d'(v) along the solved curve."""
    arr = np.asarray(v, dtype=float)
    d = eq.deposit_curve(arr)
    return (eq.dist.pdf(arr) * (arr - d) - eq.c * eq.deposit_curve.derivative(arr))[()]


def symmetric_payoff(eq: SimultaneousEquilibrium, v: float, w: float) -> float:
    """Expected profit of type v reporting type w against the equilibrium curve.

    F(w)·(v − E[d(v_j) | v_j ≤ w]) − c·d(w), the conditional expectation taken
    by quadrature.
    """
    if w <= 0.0:
        return 0.0
    dist = eq.dist
    paid = integrate(lambda z: float(eq.deposit_curve(z)) * float(dist.pdf(z)), 0.0, w)
    return float(dist.cdf(w) * v - paid.value - eq.c * eq.deposit_curve(w))
