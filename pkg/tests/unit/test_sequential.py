"""Tests for the closed-form sequential equilibria."""

import numpy as np
import pytest

from deposit_auction.core.exceptions import OutOfRangeError
from deposit_auction.services import sequential
from deposit_auction.services.beliefs import PointMass, TruncatedPrior
from deposit_auction.services.dist import ValuationDistribution

C = 0.15


@pytest.mark.unit
def test_sqrt_thresholds():
    th = sequential.sqrt_thresholds(C)
    assert th.entry == 0.0
    assert th.switch == pytest.approx(0.078261, abs=1e-6)
    assert th.pool == pytest.approx(0.869565, abs=1e-6)
    assert th.top_deposit == pytest.approx(1.958454106, abs=1e-9)


@pytest.mark.unit
@pytest.mark.parametrize(
    "v,expected",
    [(0.04, 0.020444), (0.3, 0.417664961), (0.5, 0.868628673), (0.8, 1.731271498), (0.95, 1.958454106)],
)
def test_sqrt_deposit_values(v, expected):
    assert sequential.sqrt_bidder1_deposit(C, v) == pytest.approx(expected, abs=1e-6)


@pytest.mark.unit
def test_sqrt_deposit_is_continuous_at_switch():
    s = sequential.sqrt_thresholds(C).switch
    below = sequential.sqrt_bidder1_deposit(C, s - 1e-10)
    above = sequential.sqrt_bidder1_deposit(C, s + 1e-10)
    assert above - below == pytest.approx(0.0, abs=1e-8)
    assert sequential.sqrt_bidder1_deposit(C, s) == pytest.approx(s, abs=1e-12)


@pytest.mark.unit
def test_sqrt_deposit_is_nondecreasing():
    d = sequential.sqrt_bidder1_deposit(C, np.linspace(0.0, 1.0, 2001))
    assert np.all(np.diff(d) >= 0)


@pytest.mark.unit
def test_sqrt_bid_under_and_over_deposit():
    """Low types bid their whole deposit, higher types bid their value."""
    assert sequential.sqrt_bidder1_bid(C, 0.04) == pytest.approx(0.020444, abs=1e-6)
    assert sequential.sqrt_bidder1_bid(C, 0.5) == pytest.approx(0.5)


@pytest.mark.unit
def test_sqrt_inverse_type_recovers_separating_types():
    types = np.array([0.01, 0.05, 0.078, 0.1, 0.3, 0.5, 0.8, 0.86])
    recovered = sequential.sqrt_inverse_type(C, sequential.sqrt_bidder1_deposit(C, types))
    np.testing.assert_allclose(recovered, types, atol=1e-12)


@pytest.mark.unit
def test_sqrt_inverse_type_out_of_range():
    with pytest.raises(OutOfRangeError):
        sequential.sqrt_inverse_type(C, 2.5)


@pytest.mark.unit
def test_sqrt_bidder2_response():
    d1 = sequential.sqrt_bidder1_deposit(C, 0.5)
    assert sequential.sqrt_bidder2_response(C, d1, 0.6) == pytest.approx(0.5)
    assert sequential.sqrt_bidder2_response(C, d1, 0.57) == 0.0
    top = sequential.sqrt_thresholds(C).top_deposit
    assert sequential.sqrt_bidder2_response(C, top, 1.0) == 0.0


@pytest.mark.unit
def test_sqrt_low_branch_everywhere_for_large_cost():
    th = sequential.sqrt_thresholds(0.7)
    assert th.pool == 1.0
    assert sequential.sqrt_bidder1_deposit(0.7, 1.0) == pytest.approx(1.7 / 1.96)
    assert th.top_deposit == pytest.approx(1.7 / 1.96)


@pytest.mark.unit
def test_uniform_thresholds():
    th = sequential.uniform_thresholds(C)
    assert th.entry == pytest.approx(0.130435, abs=1e-6)
    assert th.pool == pytest.approx(0.869565, abs=1e-6)
    assert th.top_deposit == pytest.approx(2.963768, abs=1e-6)


@pytest.mark.unit
def test_uniform_deposit_values():
    assert sequential.uniform_bidder1_deposit(C, 0.1) == 0.0
    assert sequential.uniform_bidder1_deposit(C, 0.5) == pytest.approx(1.023551, abs=1e-6)
    assert sequential.uniform_bidder1_deposit(C, 0.95) == pytest.approx(2.963768, abs=1e-6)
    assert sequential.uniform_bidder1_bid(C, 0.5) == pytest.approx(0.5)
    assert sequential.uniform_bidder1_bid(C, 0.1) == 0.0


@pytest.mark.unit
def test_uniform_deposits_zero_below_entry():
    entry = C / (1 + C)
    below = np.linspace(0.0, entry, 50, endpoint=False)
    assert np.all(sequential.uniform_bidder1_deposit(C, below) == 0.0)
    assert sequential.uniform_bidder1_deposit(C, entry + 1e-9) > 0.0


@pytest.mark.unit
def test_uniform_inverse_type():
    d1 = sequential.uniform_bidder1_deposit(C, 0.5)
    assert sequential.uniform_inverse_type(C, d1) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(OutOfRangeError):
        sequential.uniform_inverse_type(C, 0.01)


@pytest.mark.unit
def test_uniform_bidder2_response():
    d1 = sequential.uniform_bidder1_deposit(C, 0.5)
    assert sequential.uniform_bidder2_response(C, d1, 0.575 + 1e-9) == pytest.approx(0.5)
    assert sequential.uniform_bidder2_response(C, d1, 0.57) == 0.0
    # nobody deposited: bidder 2 wins with a zero bid
    assert sequential.uniform_bidder2_response(C, 0.0, 0.9) == 0.0
    # low off-path deposits are matched
    assert sequential.uniform_bidder2_response(C, 0.1, 0.2) == pytest.approx(0.1)
    assert sequential.uniform_bidder2_response(C, 0.1, 0.1) == 0.0


@pytest.mark.unit
def test_uniform_bidder2_response_vectorized():
    d1 = np.array([0.0, 0.1, sequential.uniform_bidder1_deposit(C, 0.5), 3.0])
    v2 = np.array([0.9, 0.9, 0.9, 0.9])
    out = sequential.uniform_bidder2_response(C, d1, v2)
    np.testing.assert_allclose(out, [0.0, 0.1, 0.5, 0.0])


@pytest.mark.unit
def test_uniform_beliefs():
    entry = C / (1 + C)
    at_zero = sequential.belief_rule("sequential-uniform", C, 0.0)
    assert isinstance(at_zero, TruncatedPrior)
    assert at_zero.hi == pytest.approx(entry)

    low = sequential.belief_rule("sequential-uniform", C, 0.05)
    assert isinstance(low, PointMass)
    assert low.location == pytest.approx(entry)

    mid = sequential.belief_rule("sequential-uniform", C, sequential.uniform_bidder1_deposit(C, 0.5))
    assert isinstance(mid, PointMass)
    assert mid.location == pytest.approx(0.5)


@pytest.mark.unit
def test_sqrt_beliefs():
    th = sequential.sqrt_thresholds(C)
    top = sequential.belief_rule("sequential-sqrt", C, th.top_deposit)
    assert isinstance(top, TruncatedPrior)
    assert top.lo == pytest.approx(th.pool)
    assert top.hi == 1.0

    above = sequential.belief_rule("sequential-sqrt", C, 3.0)
    assert isinstance(above, TruncatedPrior)

    mid = sequential.belief_rule("sequential-sqrt", C, sequential.sqrt_bidder1_deposit(C, 0.3))
    assert mid.location == pytest.approx(0.3)


@pytest.mark.unit
def test_sqrt_beliefs_when_every_type_under_deposits():
    """Test that above the top deposit the belief is v1 = 1 when no top pool exists."""
    c = 0.8
    th = sequential.sqrt_thresholds(c)
    assert th.pool == 1.0
    assert th.top_deposit == pytest.approx(1.8 / 2.56)

    above = sequential.belief_rule("sequential-sqrt", c, 1.0)
    assert above == PointMass(location=1.0)

    at_top = sequential.belief_rule("sequential-sqrt", c, th.top_deposit)
    assert at_top.location == pytest.approx(1.0)

    mid = sequential.belief_rule("sequential-sqrt", c, 0.5)
    assert mid.location == pytest.approx(np.sqrt(4 * c * c * 0.5 / (1 + c)))


@pytest.mark.unit
def test_belief_rule_unknown_regime():
    with pytest.raises(ValueError):
        sequential.belief_rule("pooling", C, 0.5)


@pytest.mark.unit
def test_solve_sequential(sqrt_dist, uniform_dist):
    assert sequential.solve_sequential(sqrt_dist, C).regime == "separating"
    assert sequential.solve_sequential(uniform_dist, C).regime == "conditional-on-entry"
    with pytest.raises(OutOfRangeError):
        sequential.solve_sequential(ValuationDistribution.quadratic(), C)
