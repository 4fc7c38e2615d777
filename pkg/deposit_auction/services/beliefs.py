"""Bidder 2's beliefs about bidder 1's type after observing a deposit."""

from typing import Annotated, Callable, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from deposit_auction.services.dist import ArrayLike, ValuationDistribution
from deposit_auction.services.numerics import integrate


class PointMass(BaseModel):
    """All mass on a single valuation."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["point"] = "point"
    location: float = Field(..., ge=0.0, le=1.0, description="Believed valuation")

    def cdf(self, x: ArrayLike) -> ArrayLike:
        return np.where(np.asarray(x, dtype=float) >= self.location, 1.0, 0.0)[()]

    def expect(self, h: Callable[[float], float], points: Optional[Sequence[float]] = None) -> float:
        return float(h(self.location))


class TruncatedPrior(BaseModel):
    """The prior conditioned on [lo, hi]."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["truncated"] = "truncated"
    dist: ValuationDistribution
    lo: float = Field(..., ge=0.0, le=1.0)
    hi: float = Field(..., ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _ordered(self) -> "TruncatedPrior":
        if not self.lo < self.hi:
            raise ValueError(f"truncation bounds must satisfy lo < hi, got [{self.lo}, {self.hi}]")
        return self

    @property
    def mass(self) -> float:
        return self.hi**self.dist.alpha - self.lo**self.dist.alpha

    def cdf(self, x: ArrayLike) -> ArrayLike:
        return self.dist.truncated_cdf(x, self.lo, self.hi)

    def expect(self, h: Callable[[float], float], points: Optional[Sequence[float]] = None) -> float:
        """E[h(v1)] under the belief, by quadrature against the prior density."""
        return self.integrate(h, self.lo, self.hi, points)

    def integrate(
        self,
        h: Callable[[float], float],
        lo: float,
        hi: float,
        points: Optional[Sequence[float]] = None,
    ) -> float:
        """∫ h dμ over [lo, hi] ∩ [self.lo, self.hi]."""
        a, b = max(lo, self.lo), min(hi, self.hi)
        if b <= a:
            return 0.0
        dist = self.dist
        result = integrate(lambda v: h(v) * float(dist.pdf(v)), a, b, points=points)
        return result.value / self.mass


Belief = Annotated[Union[PointMass, TruncatedPrior], Field(discriminator="kind")]
