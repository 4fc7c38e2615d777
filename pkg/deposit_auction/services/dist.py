"""Power-family valuation distributions on [0, 1]."""

from typing import Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from deposit_auction.core.exceptions import DegenerateIntervalError, DomainError
from deposit_auction.core.logging import get_logger

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]

PRESETS = {"sqrt": 0.5, "uniform": 1.0, "quadratic": 2.0}


def _check_unit_interval(x: ArrayLike, what: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{what} must lie in [0, 1]", details={"value": np.asarray(x).tolist()})
    return arr


class ValuationDistribution(BaseModel):
    """Prior F(x) = x^alpha on [0, 1].

    Instances are immutable and safe to share across threads.
    """

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0, description="Power-law exponent of the cdf")
    name: Optional[str] = Field(None, description="Preset name, if any")

    @classmethod
    def sqrt(cls) -> "ValuationDistribution":
        return cls(alpha=0.5, name="sqrt")

    @classmethod
    def uniform(cls) -> "ValuationDistribution":
        return cls(alpha=1.0, name="uniform")

    @classmethod
    def quadratic(cls) -> "ValuationDistribution":
        return cls(alpha=2.0, name="quadratic")

    @classmethod
    def from_name(cls, name: str) -> "ValuationDistribution":
        """Parse ``sqrt``, ``uniform``, ``quadratic`` or ``power:<alpha>``."""
        key = name.strip().lower()
        if key in PRESETS:
            return cls(alpha=PRESETS[key], name=key)
        if key.startswith("power:"):
            try:
                alpha = float(key.split(":", 1)[1])
            except ValueError as e:
                raise DomainError(f"Invalid power exponent in {name!r}") from e
            if not np.isfinite(alpha) or alpha <= 0:
                raise DomainError(f"Power exponent must be positive, got {alpha}")
            for preset, value in PRESETS.items():
                if value == alpha:
                    return cls(alpha=alpha, name=preset)
            return cls(alpha=alpha)
        raise DomainError(
            f"Unknown distribution {name!r}",
            details={"choices": sorted(PRESETS) + ["power:<alpha>"]},
        )

    @property
    def label(self) -> str:
        return self.name or f"power:{self.alpha:g}"

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + 1.0)

    @property
    def singular_at_zero(self) -> bool:
        """Whether the density diverges at 0."""
        return self.alpha < 1.0

    def cdf(self, x: ArrayLike) -> ArrayLike:
        arr = _check_unit_interval(x, "cdf argument")
        return np.power(arr, self.alpha)

    def pdf(self, x: ArrayLike) -> ArrayLike:
        arr = _check_unit_interval(x, "pdf argument")
        if self.singular_at_zero and np.any(arr == 0.0):
            raise DomainError("pdf diverges at 0", details={"alpha": self.alpha})
        if self.alpha == 1.0:
            return np.ones_like(arr)[()]
        return self.alpha * np.power(arr, self.alpha - 1.0)

    def inverse_cdf(self, q: ArrayLike) -> ArrayLike:
        arr = _check_unit_interval(q, "quantile")
        return np.power(arr, 1.0 / self.alpha)

    def truncated_cdf(self, x: ArrayLike, lo: float, hi: float) -> ArrayLike:
        """Cdf of the prior conditioned on [lo, hi]."""
        mass = self._mass(lo, hi)
        arr = np.clip(np.asarray(x, dtype=float), lo, hi)
        return (np.power(arr, self.alpha) - lo**self.alpha) / mass

    def conditional_mean(self, lo: float, hi: float) -> float:
        """E[v | lo <= v <= hi] in closed form."""
        mass = self._mass(lo, hi)
        a = self.alpha
        return float(a / (a + 1.0) * (hi ** (a + 1.0) - lo ** (a + 1.0)) / mass)

    def sample(self, rng: np.random.Generator, size: Union[int, Tuple[int, ...], None] = None) -> ArrayLike:
        """Draw valuations by inverse-cdf transform of uniform draws."""
        return self.inverse_cdf(rng.random(size))

    def _mass(self, lo: float, hi: float) -> float:
        _check_unit_interval(np.array([lo, hi]), "interval bounds")
        if hi - lo < 1e-12:
            raise DegenerateIntervalError(
                "Conditioning interval is degenerate", details={"lo": lo, "hi": hi}
            )
        return hi**self.alpha - lo**self.alpha
