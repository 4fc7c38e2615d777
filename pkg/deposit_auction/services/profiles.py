"""Strategy profiles: bidder 1's deposit rule, bidder 2's response and beliefs.

Every rule is evaluated on numpy arrays so the same profile drives the
verifier (scalar calls inside quadrature) and the Monte Carlo simulator
(vectorized over draws). Bidder 2 never over-deposits, so its bid is its
deposit, and it wins ties.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from deposit_auction.core.config import settings
from deposit_auction.core.exceptions import ConfigurationError
from deposit_auction.models.schemas import DeviationClass, Regime, RunConfig
from deposit_auction.services import pooling, sequential
from deposit_auction.services.beliefs import Belief, PointMass, TruncatedPrior
from deposit_auction.services.dist import ArrayLike, ValuationDistribution
from deposit_auction.services.numerics import RootBracket, find_root, integrate
from deposit_auction.services.simultaneous import SimultaneousEquilibrium, solve_simultaneous


# bids closer than this are treated as tied; bidder 2 wins ties
TIE_TOL = 1e-12


class Pool(NamedTuple):
    """Types [lo, hi] that all post the same deposit."""

    deposit: float
    lo: float
    hi: float


class StrategyProfile(ABC):
    """A candidate equilibrium of the sequential deposit game."""

    name: str = "profile"

    def __init__(self, c: float, dist: ValuationDistribution, dbar: float = settings.dbar) -> None:
        self.c = c
        self.dist = dist
        self.dbar = dbar

    # Bidder 1

    @abstractmethod
    def deposit(self, v1: ArrayLike) -> ArrayLike:
        """Bidder 1's equilibrium deposit."""

    def bid(self, v1: ArrayLike) -> ArrayLike:
        v = np.asarray(v1, dtype=float)
        return np.minimum(v, self.deposit(v))[()]

    def deviation_bid(self, v1: float, d1: float, deviations: DeviationClass) -> float:
        """Bid of type v1 after depositing d1.

        Under ``mimic`` a deposit that reveals type w is paired with a bid of
        at most w.
        """
        b1 = min(v1, d1)
        if deviations is DeviationClass.MIMIC:
            belief = self.belief(d1)
            if isinstance(belief, PointMass):
                b1 = min(b1, belief.location)
        return b1

    # Bidder 2

    @abstractmethod
    def respond(self, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
        """Bidder 2's deposit (and bid) after observing d1."""

    def enters(self, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
        """Whether bidder 2 bids; a zero bid counts after d1 = 0."""
        d = np.asarray(d1, dtype=float)
        return ((np.asarray(self.respond(d, v2)) > 0.0) | (d == 0.0))[()]

    @abstractmethod
    def belief(self, d1: float) -> Belief:
        """Bidder 2's belief about v1 after observing d1."""

    def believed_bid(self, v1: float, d1: float) -> float:
        """Bid bidder 2 attributes to type v1 that deposited d1."""
        return min(v1, d1)

    def bidder2_cap(self, d1: float) -> float:
        """Largest deposit bidder 2 considers after d1."""
        return min(1.0, d1)

    def entry_thresholds(self, d1: float) -> List[float]:
        """Valuations v2 at which bidder 2's response jumps."""
        return []

    def expected_payment(self, d1: float, upper: float) -> float:
        """E[b2 ; v2 < upper] after deposit d1: what bidder 1 pays when it wins."""
        dist = self.dist
        return integrate(
            lambda v2: float(self.respond(d1, v2)) * float(dist.pdf(v2)),
            0.0,
            upper,
            points=self.entry_thresholds(d1),
        ).value

    def win_threshold(self, d1: float, b1: float) -> float:
        """Smallest v2 that beats bid b1 after deposit d1, or 1 if none does.

        Generic bisection on the monotone win indicator; subclasses with a
        closed form override it.
        """

        def wins(v2: float) -> bool:
            b2 = float(self.respond(d1, v2))
            return bool(self.enters(d1, v2)) and b2 >= b1 - TIE_TOL

        if wins(0.0):
            return 0.0
        if not wins(1.0):
            return 1.0
        return find_root(lambda v2: 1.0 if wins(v2) else -1.0, RootBracket(lo=0.0, hi=1.0, tol=1e-12))

    # Structure used by quadrature and the Bayes check

    @property
    def observes_deposit(self) -> bool:
        return True

    def type_breakpoints(self) -> List[float]:
        """Types where bidder 1's deposit rule changes branch."""
        return []

    def candidate_deposits(self) -> List[float]:
        """Deposits worth probing besides the deviation grid."""
        return [0.0]

    def pools(self) -> List[Pool]:
        return []

    def separating_range(self) -> Optional[Tuple[float, float]]:
        return None

    def summary(self) -> Dict[str, float]:
        return {}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(c={self.c}, dist={self.dist.label})"


class SimultaneousProfile(StrategyProfile):
    """Both bidders deposit d(v) without seeing the other's deposit."""

    name = "simultaneous"

    def __init__(self, eq: SimultaneousEquilibrium, dbar: float = settings.dbar) -> None:
        super().__init__(eq.c, eq.dist, dbar)
        self.eq = eq

    def deposit(self, v1: ArrayLike) -> ArrayLike:
        return self.eq.deposit_curve(v1)

    def respond(self, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
        d, v = np.broadcast_arrays(np.asarray(d1, dtype=float), np.asarray(v2, dtype=float))
        return self.eq.deposit_curve(v)

    def enters(self, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
        return (np.asarray(self.respond(d1, v2)) > 0.0)[()]

    def belief(self, d1: float) -> Belief:
        return TruncatedPrior(dist=self.dist, lo=0.0, hi=1.0)

    def believed_bid(self, v1: float, d1: float) -> float:
        return float(self.eq.deposit_curve(v1))

    def bidder2_cap(self, d1: float) -> float:
        return 1.0

    def win_threshold(self, d1: float, b1: float) -> float:
        curve = self.eq.deposit_curve
        if b1 <= 0.0:
            return 0.0
        if b1 > curve.y[-1]:
            return 1.0
        return float(curve.inverse(b1))

    @property
    def observes_deposit(self) -> bool:
        return False

    def summary(self) -> Dict[str, float]:
        return {"deposit_at_1": float(self.eq.deposit_curve.y[-1])}


class TruthfulProfile(StrategyProfile):
    """d = b = v for both bidders; the second-price benchmark as c → 0."""

    name = "truthful"

    def deposit(self, v1: ArrayLike) -> ArrayLike:
        return np.asarray(v1, dtype=float)[()]

    def respond(self, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
        d, v = np.broadcast_arrays(np.asarray(d1, dtype=float), np.asarray(v2, dtype=float))
        return v.copy()[()]

    def enters(self, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
        return (np.asarray(self.respond(d1, v2)) > 0.0)[()]

    def belief(self, d1: float) -> Belief:
        if d1 <= 1.0:
            return PointMass(location=d1)
        return PointMass(location=1.0)

    def win_threshold(self, d1: float, b1: float) -> float:
        return min(1.0, max(0.0, b1))

    def separating_range(self) -> Optional[Tuple[float, float]]:
        return (0.0, 1.0)


class _PriceResponseProfile(StrategyProfile):
    """Bidder 2 expects to pay a price p(d1) and enters iff v2 ≥ (1+c)p."""

    def _thresholds(self) -> sequential.SequentialThresholds:
        raise NotImplementedError

    def _price(self, d1: float) -> Optional[float]:
        """Price bidder 2 matches after d1, or None when it never enters."""
        raise NotImplementedError

    def entry_thresholds(self, d1: float) -> List[float]:
        price = self._price(d1)
        if price is None or price <= 0.0:
            return []
        return [min(1.0, (1.0 + self.c) * price)]

    def win_threshold(self, d1: float, b1: float) -> float:
        if d1 == 0.0:
            return 0.0
        price = self._price(d1)
        if price is None or price < b1 - TIE_TOL:
            return 1.0
        return min(1.0, (1.0 + self.c) * price)

    def expected_payment(self, d1: float, upper: float) -> float:
        price = self._price(d1)
        if price is None or price <= 0.0:
            return 0.0
        threshold = min(1.0, (1.0 + self.c) * price)
        if upper <= threshold:
            return 0.0
        return float(price * (self.dist.cdf(upper) - self.dist.cdf(threshold)))

    def type_breakpoints(self) -> List[float]:
        th = self._thresholds()
        return sorted({p for p in (th.entry, th.switch, th.pool) if 0.0 < p < 1.0})

    def candidate_deposits(self) -> List[float]:
        th = self._thresholds()
        return [0.0, th.top_deposit] + [float(self.deposit(p)) for p in self.type_breakpoints()]

    def summary(self) -> Dict[str, float]:
        return self._thresholds().model_dump()


class SqrtSeparatingProfile(_PriceResponseProfile):
    """Separating equilibrium for the square-root prior."""

    name = Regime.SEQUENTIAL_SQRT.value

    def __init__(self, c: float, dbar: float = settings.dbar) -> None:
        super().__init__(c, ValuationDistribution.sqrt(), dbar)

    def _thresholds(self) -> sequential.SequentialThresholds:
        return sequential.sqrt_thresholds(self.c)

    def _price(self, d1: float) -> Optional[float]:
        th = self._thresholds()
        if d1 >= th.top_deposit - sequential.RANGE_TOL:
            return None
        return min(d1, float(sequential.sqrt_inverse_type(self.c, d1)))

    def deposit(self, v1: ArrayLike) -> ArrayLike:
        return sequential.sqrt_bidder1_deposit(self.c, v1)

    def respond(self, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
        return sequential.sqrt_bidder2_response(self.c, d1, v2)

    def belief(self, d1: float) -> Belief:
        return sequential.belief_rule(self.name, self.c, d1)

    def pools(self) -> List[Pool]:
        th = self._thresholds()
        return [Pool(th.top_deposit, th.pool, 1.0)] if th.pool < 1.0 else []

    def separating_range(self) -> Optional[Tuple[float, float]]:
        return (0.0, self._thresholds().pool)


class UniformEntryProfile(_PriceResponseProfile):
    """Separation conditional on entry for the uniform prior."""

    name = Regime.SEQUENTIAL_UNIFORM.value

    def __init__(self, c: float, dbar: float = settings.dbar) -> None:
        super().__init__(c, ValuationDistribution.uniform(), dbar)

    def _thresholds(self) -> sequential.SequentialThresholds:
        return sequential.uniform_thresholds(self.c)

    def _price(self, d1: float) -> Optional[float]:
        th = self._thresholds()
        if d1 >= th.top_deposit - sequential.RANGE_TOL:
            return None
        if d1 <= th.entry:
            return d1
        return float(sequential.uniform_inverse_type(self.c, d1))

    def deposit(self, v1: ArrayLike) -> ArrayLike:
        return sequential.uniform_bidder1_deposit(self.c, v1)

    def respond(self, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
        return sequential.uniform_bidder2_response(self.c, d1, v2)

    def belief(self, d1: float) -> Belief:
        return sequential.belief_rule(self.name, self.c, d1)

    def pools(self) -> List[Pool]:
        th = self._thresholds()
        return [Pool(0.0, 0.0, th.entry), Pool(th.top_deposit, th.pool, 1.0)]

    def separating_range(self) -> Optional[Tuple[float, float]]:
        th = self._thresholds()
        return (th.entry, th.pool)


class PoolingProfile(StrategyProfile):
    """Two deposit levels, 0 below the marginal type u and 1 above it."""

    name = Regime.POOLING.value

    def __init__(self, params: pooling.PoolingParams) -> None:
        super().__init__(params.c, ValuationDistribution.quadratic(), params.dbar)
        self.params = params

    def deposit(self, v1: ArrayLike) -> ArrayLike:
        return pooling.pooling_bidder1_deposit(self.params, v1)

    def bid(self, v1: ArrayLike) -> ArrayLike:
        return pooling.pooling_bidder1_bid(self.params, v1)

    def respond(self, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
        return pooling.bidder2_pooling_response(self.params, d1, v2)

    def belief(self, d1: float) -> Belief:
        u = self.params.u
        if d1 <= u:
            if u - d1 < 1e-12:
                return PointMass(location=u)
            return TruncatedPrior(dist=self.dist, lo=d1, hi=u)
        return TruncatedPrior(dist=self.dist, lo=u, hi=min(1.0, d1))

    def entry_thresholds(self, d1: float) -> List[float]:
        if d1 <= 0.0:
            return []
        if d1 <= self.params.u:
            return [min(1.0, (1.0 + self.c) * d1)]
        return [pooling.entry_threshold(self.params, d1)]

    def win_threshold(self, d1: float, b1: float) -> float:
        if d1 == 0.0:
            return 0.0
        if d1 <= self.params.u:
            return 1.0 if d1 < b1 else min(1.0, (1.0 + self.c) * d1)
        return pooling.loss_bound(self.params, d1, b1)

    def expected_payment(self, d1: float, upper: float) -> float:
        params = self.params
        if d1 <= 0.0:
            return 0.0
        if d1 <= params.u:
            threshold = min(1.0, (1.0 + self.c) * d1)
            return d1 * max(0.0, upper**2 - threshold**2)
        threshold = pooling.entry_threshold(params, d1)
        if upper <= threshold:
            return 0.0
        level = min(1.0, d1)
        return integrate(
            lambda v2: pooling.bidder2_interior_deposit(params, level, v2) * 2.0 * v2,
            threshold,
            upper,
        ).value

    def type_breakpoints(self) -> List[float]:
        return [self.params.u]

    def candidate_deposits(self) -> List[float]:
        return [0.0, self.params.u, 1.0]

    def pools(self) -> List[Pool]:
        return [Pool(0.0, 0.0, self.params.u), Pool(1.0, self.params.u, 1.0)]

    def summary(self) -> Dict[str, float]:
        return {"u": self.params.u, "v": self.params.v}


class ScaledProfile(StrategyProfile):
    """Bidder 1's deposits multiplied by a constant; everything else unchanged."""

    def __init__(self, base: StrategyProfile, scale: float) -> None:
        super().__init__(base.c, base.dist, base.dbar)
        self.base = base
        self.scale = scale
        self.name = f"{base.name}*{scale:g}"

    def deposit(self, v1: ArrayLike) -> ArrayLike:
        return np.minimum(self.scale * np.asarray(self.base.deposit(v1)), self.dbar)[()]

    def respond(self, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
        return self.base.respond(d1, v2)

    def enters(self, d1: ArrayLike, v2: ArrayLike) -> ArrayLike:
        return self.base.enters(d1, v2)

    def belief(self, d1: float) -> Belief:
        return self.base.belief(d1)

    def believed_bid(self, v1: float, d1: float) -> float:
        return self.base.believed_bid(v1, d1)

    def bidder2_cap(self, d1: float) -> float:
        return self.base.bidder2_cap(d1)

    def entry_thresholds(self, d1: float) -> List[float]:
        return self.base.entry_thresholds(d1)

    def win_threshold(self, d1: float, b1: float) -> float:
        return self.base.win_threshold(d1, b1)

    def expected_payment(self, d1: float, upper: float) -> float:
        return self.base.expected_payment(d1, upper)

    @property
    def observes_deposit(self) -> bool:
        return self.base.observes_deposit

    def type_breakpoints(self) -> List[float]:
        return self.base.type_breakpoints()

    def candidate_deposits(self) -> List[float]:
        return self.base.candidate_deposits()

    def summary(self) -> Dict[str, Any]:
        return {**self.base.summary(), "scale": self.scale}


def build_profile(config: RunConfig) -> StrategyProfile:
    """Solve the equilibrium named by a run configuration."""
    dist = ValuationDistribution.from_name(config.dist)
    if config.regime is Regime.SIMULTANEOUS:
        profile: StrategyProfile = SimultaneousProfile(solve_simultaneous(dist, config.cost, config.step), config.dbar)
    elif config.regime is Regime.SEQUENTIAL_SQRT:
        profile = SqrtSeparatingProfile(config.cost, config.dbar)
    elif config.regime is Regime.SEQUENTIAL_UNIFORM:
        profile = UniformEntryProfile(config.cost, config.dbar)
    elif config.regime is Regime.POOLING:
        if config.marginal_u is not None:
            params = pooling.PoolingParams.from_marginal_type(config.cost, config.marginal_u, config.dbar)
        else:
            params = pooling.solve_marginal_types(config.cost, config.dbar)
        profile = PoolingProfile(params)
    else:  # pragma: no cover
        raise ConfigurationError(f"Unsupported regime {config.regime}")

    if config.mutate_scale is not None:
        profile = ScaledProfile(profile, config.mutate_scale)
    return profile
