"""Tests for the power-family valuation distributions."""

import numpy as np
import pytest
from scipy import stats

from deposit_auction.core.exceptions import DegenerateIntervalError, DomainError
from deposit_auction.services.dist import ValuationDistribution


@pytest.mark.unit
@pytest.mark.parametrize(
    "name,alpha",
    [("sqrt", 0.5), ("uniform", 1.0), ("quadratic", 2.0), ("power:3", 3.0), ("POWER:0.5", 0.5)],
)
def test_from_name(name, alpha):
    dist = ValuationDistribution.from_name(name)
    assert dist.alpha == alpha


@pytest.mark.unit
def test_from_name_labels_presets():
    assert ValuationDistribution.from_name("power:2").label == "quadratic"
    assert ValuationDistribution.from_name("power:3").label == "power:3"


@pytest.mark.unit
@pytest.mark.parametrize("name", ["cubic", "power:-1", "power:abc", "power:0"])
def test_from_name_rejects_unknown(name):
    with pytest.raises(DomainError):
        ValuationDistribution.from_name(name)


@pytest.mark.unit
def test_cdf_and_pdf_values(sqrt_dist, uniform_dist, quadratic_dist):
    assert quadratic_dist.cdf(0.5) == pytest.approx(0.25)
    assert quadratic_dist.pdf(0.5) == pytest.approx(1.0)
    assert sqrt_dist.cdf(0.25) == pytest.approx(0.5)
    assert sqrt_dist.pdf(0.25) == pytest.approx(1.0)
    assert uniform_dist.pdf(0.0) == 1.0
    assert quadratic_dist.pdf(0.0) == 0.0


@pytest.mark.unit
def test_cdf_endpoints(sqrt_dist, quadratic_dist):
    for dist in (sqrt_dist, quadratic_dist):
        assert dist.cdf(0.0) == 0.0
        assert dist.cdf(1.0) == 1.0


@pytest.mark.unit
def test_cdf_is_vectorized(quadratic_dist):
    values = quadratic_dist.cdf(np.array([0.0, 0.5, 1.0]))
    np.testing.assert_allclose(values, [0.0, 0.25, 1.0])


@pytest.mark.unit
def test_sqrt_pdf_singular_at_zero(sqrt_dist):
    assert sqrt_dist.singular_at_zero
    with pytest.raises(DomainError):
        sqrt_dist.pdf(0.0)


@pytest.mark.unit
@pytest.mark.parametrize("x", [-0.1, 1.1, float("nan")])
def test_cdf_rejects_out_of_range(uniform_dist, x):
    with pytest.raises(DomainError):
        uniform_dist.cdf(x)


@pytest.mark.unit
def test_inverse_cdf(sqrt_dist, quadratic_dist):
    assert sqrt_dist.inverse_cdf(0.5) == pytest.approx(0.25)
    assert quadratic_dist.inverse_cdf(0.25) == pytest.approx(0.5)


@pytest.mark.unit
def test_mean(sqrt_dist, uniform_dist, quadratic_dist):
    assert sqrt_dist.mean == pytest.approx(1.0 / 3.0)
    assert uniform_dist.mean == pytest.approx(0.5)
    assert quadratic_dist.mean == pytest.approx(2.0 / 3.0)


@pytest.mark.unit
def test_truncated_cdf(quadratic_dist):
    assert quadratic_dist.truncated_cdf(0.2, 0.3, 0.9) == 0.0
    assert quadratic_dist.truncated_cdf(0.9, 0.3, 0.9) == pytest.approx(1.0)
    assert quadratic_dist.truncated_cdf(0.6, 0.3, 0.9) == pytest.approx((0.36 - 0.09) / (0.81 - 0.09))


@pytest.mark.unit
def test_conditional_mean(quadratic_dist, uniform_dist):
    assert quadratic_dist.conditional_mean(0.290790334, 1.0) == pytest.approx(0.710340, abs=1e-6)
    assert quadratic_dist.conditional_mean(0.382981, 1.0) == pytest.approx(0.737371, abs=1e-6)
    assert uniform_dist.conditional_mean(0.2, 0.6) == pytest.approx(0.4)


@pytest.mark.unit
def test_degenerate_interval_rejected(quadratic_dist):
    with pytest.raises(DegenerateIntervalError):
        quadratic_dist.conditional_mean(0.5, 0.5)
    with pytest.raises(DegenerateIntervalError):
        quadratic_dist.truncated_cdf(0.5, 0.5, 0.5)


@pytest.mark.unit
@pytest.mark.parametrize("name", ["sqrt", "uniform", "quadratic"])
def test_sample_matches_cdf(name):
    """Test that inverse-cdf sampling passes a Kolmogorov-Smirnov test."""
    dist = ValuationDistribution.from_name(name)
    draws = dist.sample(np.random.default_rng(7), 5000)

    assert draws.shape == (5000,)
    assert np.all((draws >= 0.0) & (draws <= 1.0))
    assert stats.kstest(draws, dist.cdf).pvalue > 0.001


@pytest.mark.unit
def test_sample_is_reproducible(uniform_dist):
    a = uniform_dist.sample(np.random.default_rng(3), (10, 2))
    b = uniform_dist.sample(np.random.default_rng(3), (10, 2))
    assert a.shape == (10, 2)
    np.testing.assert_array_equal(a, b)
