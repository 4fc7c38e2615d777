"""Pydantic schemas for run configuration and command outputs."""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from deposit_auction.core.config import settings
from deposit_auction.core.exceptions import DomainError
from deposit_auction.services.dist import ValuationDistribution


class Regime(str, Enum):
    """Equilibrium regime of a run."""

    SIMULTANEOUS = "simultaneous"
    SEQUENTIAL_SQRT = "sequential-sqrt"
    SEQUENTIAL_UNIFORM = "sequential-uniform"
    POOLING = "pooling"


class DeviationClass(str, Enum):
    """Which bids a deviating bidder 1 may combine with its deposit."""

    FULL = "full"
    MIMIC = "mimic"


class Winner(str, Enum):
    BIDDER1 = "bidder1"
    BIDDER2 = "bidder2"
    NONE = "none"


REQUIRED_DIST: Dict[Regime, str] = {
    Regime.SEQUENTIAL_SQRT: "sqrt",
    Regime.SEQUENTIAL_UNIFORM: "uniform",
    Regime.POOLING: "quadratic",
}


class RunConfig(BaseModel):
    """Configuration of one command run."""

    regime: Regime = Field(..., description="Equilibrium regime")
    dist: Optional[str] = Field(None, description="sqrt | uniform | quadratic | power:<alpha>")
    cost: float = Field(..., gt=0, description="Marginal deposit cost c")
    n: int = Field(default=100_000, ge=1, description="Monte Carlo draws")
    seed: int = Field(default=42, ge=0, description="Root seed")
    eps: float = Field(default=settings.eps, gt=0, description="Deviation gain tolerance")
    step: float = Field(default=settings.ode_step, gt=0, description="ODE step")
    dbar: float = Field(default=settings.dbar, ge=1.0, description="Maximum deposit")
    out: Optional[Path] = Field(None, description="Output path; stdout when absent")
    summary: Optional[Path] = Field(None, description="Path for the solve summary JSON")
    deviations: DeviationClass = Field(default=DeviationClass.MIMIC, description="Bidder-1 deviation class")
    mutate_scale: Optional[float] = Field(None, gt=0, description="Scale bidder 1's deposits")
    type_grid: int = Field(default=settings.type_grid, ge=20, description="Types per check")
    dev_grid: int = Field(default=settings.dev_grid, ge=100, description="Deviation grid size")
    deposit_grid: int = Field(default=settings.deposit_grid, ge=2, description="Observed deposits checked for bidder 2")
    response_d1: Optional[float] = Field(None, ge=0, description="Emit bidder 2's response to this deposit")
    v1: Optional[float] = Field(None, ge=0, le=1, description="Bidder-1 type for a deviation scan")
    points: int = Field(default=201, ge=2, description="Deposits in a deviation scan")
    marginal_u: Optional[float] = Field(None, gt=0, lt=1, description="Evaluate pooling at this u")

    @model_validator(mode="before")
    @classmethod
    def _resolve_alias(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("regime") == "sequential":
            dist = (data.get("dist") or "").lower()
            if dist not in ("sqrt", "uniform"):
                raise ValueError("regime 'sequential' needs --dist sqrt or --dist uniform")
            data = {**data, "regime": f"sequential-{dist}"}
        return data

    @model_validator(mode="after")
    def _check_dist(self) -> "RunConfig":
        required = REQUIRED_DIST.get(self.regime)
        try:
            label = ValuationDistribution.from_name(self.dist or required or "quadratic").label
        except DomainError as e:
            raise ValueError(e.message) from e
        if required is not None and label != required:
            raise ValueError(f"regime {self.regime.value} requires dist {required}, got {self.dist}")
        self.dist = label
        if self.marginal_u is not None and self.regime is not Regime.POOLING:
            raise ValueError("marginal_u only applies to the pooling regime")
        return self


class InequalityCheck(BaseModel):
    value: float = Field(..., description="(u(1+c))²")
    bound: float = Field(..., description="c")
    holds: bool


class SolveSummary(BaseModel):
    """Parameters and thresholds of a solved equilibrium."""

    regime: Regime
    dist: str
    c: float
    parameters: Dict[str, float] = Field(default_factory=dict)
    residuals: Dict[str, float] = Field(default_factory=dict)
    inequality_check: Optional[InequalityCheck] = None
    consistent: bool = Field(True, description="Whether all residuals vanish")


class AuctionOutcome(BaseModel):
    """Result of one auction between two bidders."""

    v1: float
    v2: float
    d1: float
    d2: float
    b1: float
    b2: float
    winner: Winner
    price: float = Field(..., description="Losing bid")
    payoff1: float
    payoff2: float
    welfare: float


class MonteCarloMetrics(BaseModel):
    """Aggregate statistics over i.i.d. valuation pairs."""

    n: int
    seed: int
    misallocation_prob: float = Field(..., ge=0, le=1)
    misallocation_stderr: float = Field(..., ge=0)
    unallocated_prob: float = Field(..., ge=0, le=1)
    expected_welfare: float
    welfare_stderr: float = Field(..., ge=0)
    expected_revenue: float
    expected_deposit_cost: float = Field(..., description="c·E[d1 + d2]")
    expected_deposit_waste: float = Field(..., description="c·E[(d1 − b1) + (d2 − b2)]")
    bidder1_entry_rate: float = Field(..., ge=0, le=1)
    bidder2_entry_rate: float = Field(..., ge=0, le=1)


class Bidder1Check(BaseModel):
    deviations: DeviationClass
    types: List[float]
    gains: List[float]
    best_deposits: List[float]
    max_gain: float
    worst_type: float
    passed: bool


class Bidder2Check(BaseModel):
    deposits: List[float] = Field(..., description="Observed bidder-1 deposits checked")
    types: List[float] = Field(..., description="Bidder-2 valuations checked")
    gains: List[List[float]] = Field(..., description="Gain per deposit (rows) and type (columns)")
    max_gain: float
    worst_deposit: float
    worst_type: float
    passed: bool


class PoolResidual(BaseModel):
    deposit: float
    lo: float
    hi: float
    max_cdf_gap: float


class BeliefCheck(BaseModel):
    separating_residual: float = Field(0.0, description="Max |preimage − belief location|")
    pools: List[PoolResidual] = Field(default_factory=list)
    prior_residual: float = Field(0.0, description="Max cdf gap when deposits are unobserved")
    max_residual: float
    consistent: bool


class VerificationReport(BaseModel):
    """Deviation gains and belief residuals of a strategy profile."""

    profile: str
    dist: str
    c: float
    eps: float
    bidder1: Bidder1Check
    bidder2: Bidder2Check
    beliefs: BeliefCheck
    passed: bool = Field(..., description="Both bidders' max gains within eps")


class ScanPoint(BaseModel):
    d1: float
    profit: float
