"""Tests for Pydantic schemas and models."""

import pytest
from pydantic import ValidationError

from deposit_auction.models.schemas import (
    DeviationClass,
    MonteCarloMetrics,
    Regime,
    RunConfig,
    SolveSummary,
)


@pytest.mark.unit
def test_run_config_defaults():
    """Test RunConfig with only the required fields."""
    config = RunConfig(regime="pooling", cost=0.22)

    assert config.regime is Regime.POOLING
    assert config.dist == "quadratic"
    assert config.n == 100_000
    assert config.seed == 42
    assert config.eps == 1e-3
    assert config.deviations is DeviationClass.MIMIC
    assert config.out is None


@pytest.mark.unit
@pytest.mark.parametrize("dist,regime", [("sqrt", Regime.SEQUENTIAL_SQRT), ("uniform", Regime.SEQUENTIAL_UNIFORM)])
def test_sequential_alias(dist, regime):
    assert RunConfig(regime="sequential", dist=dist, cost=0.15).regime is regime


@pytest.mark.unit
def test_sequential_alias_needs_dist():
    with pytest.raises(ValidationError):
        RunConfig(regime="sequential", cost=0.15)


@pytest.mark.unit
@pytest.mark.parametrize(
    "regime,dist",
    [("pooling", "sqrt"), ("sequential-sqrt", "uniform"), ("sequential-uniform", "quadratic")],
)
def test_incompatible_dist_rejected(regime, dist):
    with pytest.raises(ValidationError) as exc:
        RunConfig(regime=regime, dist=dist, cost=0.2)
    assert "requires dist" in str(exc.value)


@pytest.mark.unit
def test_power_alias_of_preset_accepted():
    assert RunConfig(regime="pooling", dist="power:2", cost=0.22).dist == "quadratic"
    assert RunConfig(regime="simultaneous", dist="power:3", cost=0.1).dist == "power:3"


@pytest.mark.unit
@pytest.mark.parametrize(
    "overrides",
    [
        {"cost": 0.0},
        {"cost": -0.1},
        {"n": 0},
        {"seed": -1},
        {"dist": "cubic"},
        {"regime": "auction"},
        {"type_grid": 5},
        {"marginal_u": 1.5},
    ],
)
def test_run_config_rejects_invalid_values(overrides):
    values = {"regime": "simultaneous", "dist": "uniform", "cost": 0.15, **overrides}
    with pytest.raises(ValidationError):
        RunConfig(**values)


@pytest.mark.unit
def test_marginal_type_only_for_pooling():
    with pytest.raises(ValidationError):
        RunConfig(regime="simultaneous", dist="uniform", cost=0.15, marginal_u=0.4)
    assert RunConfig(regime="pooling", cost=0.22, marginal_u=0.4).marginal_u == 0.4


@pytest.mark.unit
def test_metrics_bounds():
    values = {
        "n": 10,
        "seed": 1,
        "misallocation_prob": 0.1,
        "misallocation_stderr": 0.01,
        "unallocated_prob": 0.0,
        "expected_welfare": 0.5,
        "welfare_stderr": 0.01,
        "expected_revenue": 0.2,
        "expected_deposit_cost": 0.1,
        "expected_deposit_waste": 0.0,
        "bidder1_entry_rate": 1.0,
        "bidder2_entry_rate": 0.5,
    }
    assert MonteCarloMetrics(**values).n == 10
    with pytest.raises(ValidationError):
        MonteCarloMetrics(**{**values, "misallocation_prob": 1.5})


@pytest.mark.unit
def test_solve_summary_serializes_enums():
    summary = SolveSummary(regime=Regime.POOLING, dist="quadratic", c=0.22, parameters={"u": 0.29})
    data = summary.model_dump(mode="json")
    assert data["regime"] == "pooling"
    assert data["inequality_check"] is None
    assert data["consistent"] is True
