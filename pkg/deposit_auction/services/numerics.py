"""Numeric kernels: RK4 marching, bracketed roots, quadrature and 1-D maximization."""

import math
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import integrate as sp_integrate
from scipy import optimize
from scipy.interpolate import PchipInterpolator

from deposit_auction.core.exceptions import (
    ConvergenceError,
    DomainError,
    NoSignChangeError,
    NonFiniteError,
)
from deposit_auction.core.logging import get_logger

logger = get_logger(__name__)

MAX_ROOT_ITERATIONS = 200


class Curve:
    """Sampled function x -> y with monotone piecewise-cubic or linear interpolation.

    Evaluation at a knot returns the knot value exactly. Outside the knot
    range the end values are held constant.
    """

    def __init__(self, x: Sequence[float], y: Sequence[float], interpolation: str = "pchip") -> None:
        x_arr = np.asarray(x, dtype=float)
        y_arr = np.asarray(y, dtype=float)
        if x_arr.ndim != 1 or x_arr.shape != y_arr.shape or x_arr.size < 2:
            raise DomainError("Curve needs matching 1-D knot arrays with at least two knots")
        if np.any(np.diff(x_arr) <= 0):
            raise DomainError("Curve knots must be strictly increasing in x")
        if interpolation not in ("pchip", "linear"):
            raise DomainError(f"Unknown interpolation {interpolation!r}")

        self.x = x_arr
        self.y = y_arr
        self.interpolation = interpolation
        self._pchip = PchipInterpolator(x_arr, y_arr, extrapolate=False) if interpolation == "pchip" else None
        self._inverse: Optional["Curve"] = None

    def __call__(self, x):
        xq = np.clip(np.asarray(x, dtype=float), self.x[0], self.x[-1])
        if self._pchip is None:
            return np.interp(xq, self.x, self.y)[()]
        return self._pchip(xq)[()]

    def derivative(self, x):
        xq = np.clip(np.asarray(x, dtype=float), self.x[0], self.x[-1])
        if self._pchip is None:
            idx = np.clip(np.searchsorted(self.x, xq, side="right") - 1, 0, self.x.size - 2)
            return ((self.y[idx + 1] - self.y[idx]) / (self.x[idx + 1] - self.x[idx]))[()]
        return self._pchip.derivative()(xq)[()]

    def inverse(self, y):
        """Evaluate the inverse of a strictly increasing curve."""
        if self._inverse is None:
            if np.any(np.diff(self.y) <= 0):
                raise DomainError("Only strictly increasing curves can be inverted")
            self._inverse = Curve(self.y, self.x, self.interpolation)
        return self._inverse(y)

    def __repr__(self) -> str:
        return f"Curve(knots={self.x.size}, x=[{self.x[0]:g}, {self.x[-1]:g}], interpolation={self.interpolation!r})"


class RootBracket(BaseModel):
    """Interval on which a target function changes sign."""

    model_config = ConfigDict(frozen=True)

    lo: float = Field(..., description="Left end of the bracket")
    hi: float = Field(..., description="Right end of the bracket")
    tol: float = Field(default=1e-12, gt=0, description="Absolute x tolerance at termination")

    @model_validator(mode="after")
    def _ordered(self) -> "RootBracket":
        if not self.lo < self.hi:
            raise ValueError(f"bracket must satisfy lo < hi, got [{self.lo}, {self.hi}]")
        return self


class IntegrationResult(NamedTuple):
    """Quadrature value with its error estimate and convergence metadata."""

    value: float
    abserr: float
    converged: bool
    message: str = ""


class Maximum(NamedTuple):
    argmax: float
    value: float


def solve_ivp(
    rhs: Callable[[float, float], float],
    x0: float,
    y0: float,
    x_end: float,
    step: float,
) -> Curve:
    """March y' = rhs(x, y) from (x0, y0) to x_end with classic fixed-step RK4.

    The step is shrunk to divide the span evenly, so the last knot sits
    exactly on x_end.

    Args:
        rhs: Right-hand side of the ODE.
        x0: Initial abscissa.
        y0: Initial value.
        x_end: Final abscissa, greater than x0.
        step: Nominal step size.

    Returns:
        Curve through all RK4 knots, starting at (x0, y0).

    Raises:
        NonFiniteError: If rhs returns a non-finite value.
    """
    if step <= 0:
        raise DomainError("ODE step must be positive", details={"step": step})
    if not x_end > x0:
        raise DomainError("x_end must exceed x0", details={"x0": x0, "x_end": x_end})

    n = max(1, math.ceil((x_end - x0) / step - 1e-9))
    h = (x_end - x0) / n
    xs = x0 + h * np.arange(n + 1)
    xs[-1] = x_end
    ys = np.empty(n + 1)
    ys[0] = y0

    def evaluate(x: float, y: float) -> float:
        value = rhs(x, y)
        if not math.isfinite(value):
            raise NonFiniteError(
                "ODE right-hand side is not finite",
                details={"x": float(x), "y": float(y), "value": float(value)},
            )
        return value

    y = float(y0)
    for i in range(n):
        x = float(xs[i])
        k1 = evaluate(x, y)
        k2 = evaluate(x + h / 2, y + h / 2 * k1)
        k3 = evaluate(x + h / 2, y + h / 2 * k2)
        k4 = evaluate(x + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[i + 1] = y

    logger.debug("RK4 march finished", extra={"x0": x0, "x_end": x_end, "steps": n, "y_end": y})
    return Curve(xs, ys)


def find_root(g: Callable[[float], float], bracket: RootBracket) -> float:
    """Brent's method on a sign-changing bracket.

    Raises:
        NoSignChangeError: If g has the same strict sign at both ends.
        ConvergenceError: If the iteration cap is hit.
    """
    g_lo = g(bracket.lo)
    g_hi = g(bracket.hi)
    if g_lo == 0:
        return bracket.lo
    if g_hi == 0:
        return bracket.hi
    if np.sign(g_lo) == np.sign(g_hi):
        raise NoSignChangeError(
            "Target function does not change sign on the bracket",
            details={"lo": bracket.lo, "hi": bracket.hi, "g_lo": float(g_lo), "g_hi": float(g_hi)},
        )

    try:
        root, info = optimize.brentq(
            g,
            bracket.lo,
            bracket.hi,
            xtol=bracket.tol,
            maxiter=MAX_ROOT_ITERATIONS,
            full_output=True,
            disp=False,
        )
    except RuntimeError as e:
        raise ConvergenceError(str(e), details={"lo": bracket.lo, "hi": bracket.hi}) from e

    if not info.converged:
        raise ConvergenceError(
            f"Root finding did not converge: {info.flag}",
            details={"lo": bracket.lo, "hi": bracket.hi, "iterations": info.iterations},
        )
    return float(root)


def integrate(
    h: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    points: Optional[Sequence[float]] = None,
    limit: int = 200,
) -> IntegrationResult:
    """Adaptive Gauss-Kronrod quadrature that never evaluates the endpoints.

    Args:
        h: Integrand, finite on (lo, hi).
        lo: Lower limit.
        hi: Upper limit.
        tol: Absolute tolerance.
        points: Interior discontinuities or kinks of h.
        limit: Subinterval cap.

    Returns:
        IntegrationResult; ``converged`` is False when QUADPACK reports trouble.
    """
    if hi <= lo:
        return IntegrationResult(0.0, 0.0, True)

    breaks = None
    if points is not None:
        inner = sorted({float(p) for p in points if lo < p < hi})
        breaks = inner or None

    out = sp_integrate.quad(h, lo, hi, epsabs=tol, epsrel=tol, limit=limit, points=breaks, full_output=1)
    value, abserr = out[0], out[1]
    if len(out) > 3:
        message = str(out[3]).strip().splitlines()[0]
        logger.warning("Quadrature tolerance not reached", extra={"lo": lo, "hi": hi, "abserr": abserr})
        return IntegrationResult(float(value), float(abserr), False, message)
    return IntegrationResult(float(value), float(abserr), True)


def maximize_1d(
    h: Callable[[float], float],
    lo: float,
    hi: float,
    grid_n: int = 64,
    refine_tol: float = 1e-9,
) -> Maximum:
    """Grid scan followed by bounded Brent/golden refinement around the best cell.

    Flat functions return ``lo``; the refinement is only accepted when it
    strictly improves on the best grid sample.
    """
    if grid_n < 16:
        raise DomainError("maximize_1d needs at least 16 grid points", details={"grid_n": grid_n})
    if hi < lo:
        raise DomainError("maximize_1d needs lo <= hi", details={"lo": lo, "hi": hi})
    if hi == lo:
        return Maximum(lo, float(h(lo)))

    grid = np.linspace(lo, hi, grid_n)
    values = np.array([h(x) for x in grid], dtype=float)
    k = int(np.argmax(values))
    best = Maximum(float(grid[k]), float(values[k]))

    left = grid[max(k - 1, 0)]
    right = grid[min(k + 1, grid_n - 1)]
    res = optimize.minimize_scalar(
        lambda x: -h(x),
        bounds=(float(left), float(right)),
        method="bounded",
        options={"xatol": refine_tol},
    )
    if res.success and -res.fun > best.value:
        best = Maximum(float(res.x), float(-res.fun))
    return best
