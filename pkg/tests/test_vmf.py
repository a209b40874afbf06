"""Tests for the von Mises-Fisher estimator, sampler and density."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from src.core.exceptions import ZeroResultant
from src.services import vmf
from src.services.embedding_service import normalize_rows


def _unit(rng, p):
    return normalize_rows(rng.normal(size=(1, p)))[0]


def test_bessel_ratio_closed_form_in_three_dimensions():
    """Test A_3(kappa) = coth(kappa) - 1/kappa."""
    for kappa in (0.1, 2.0, 30.0, 500.0):
        expected = 1.0 / math.tanh(kappa) - 1.0 / kappa
        assert vmf.bessel_ratio(3, kappa) == pytest.approx(expected, rel=1e-10)


def test_bessel_ratio_matches_unscaled_scipy():
    """Test moderate arguments against the plain Bessel ratio."""
    for p, kappa in [(2, 1.0), (10, 5.0), (50, 20.0)]:
        expected = special.iv(p / 2, kappa) / special.iv(p / 2 - 1, kappa)
        assert vmf.bessel_ratio(p, kappa) == pytest.approx(expected, rel=1e-10)


def test_bessel_ratio_extremes():
    """Test kappa=0, high dimension with small kappa, and very large kappa."""
    assert vmf.bessel_ratio(10, 0.0) == 0.0
    # I_nu underflows here; the continued fraction takes over
    assert vmf.bessel_ratio(1000, 1.0) == pytest.approx(1.0 / 1000.0, rel=1e-5)
    large = vmf.bessel_ratio(100, vmf.KAPPA_MAX)
    assert 0.999 < large < 1.0
    with pytest.raises(ValueError):
        vmf.bessel_ratio(1, 1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=2, max_value=300), st.floats(min_value=1e-3, max_value=1e4))
def test_bessel_ratio_in_unit_interval(p, kappa):
    """Test that A_p stays in [0, 1) and is finite."""
    value = vmf.bessel_ratio(p, kappa)
    assert np.isfinite(value)
    assert 0.0 <= value < 1.0


def test_bessel_ratio_increases_with_kappa():
    """Test monotonicity in kappa for a fixed dimension."""
    values = [vmf.bessel_ratio(20, kappa) for kappa in (0.5, 1.0, 5.0, 50.0, 500.0)]
    assert values == sorted(values)


def test_estimate_identical_vectors_clamps_kappa(rng):
    """Test a perfectly concentrated sample."""
    v = _unit(rng, 5)
    fitted = vmf.estimate(np.tile(v, (4, 1)))
    np.testing.assert_allclose(fitted.mu, v)
    assert fitted.kappa == vmf.KAPPA_MAX


def test_estimate_antipodal_raises():
    """Test that cancelling vectors have no mean direction."""
    with pytest.raises(ZeroResultant):
        vmf.estimate(np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]))


def test_estimate_solves_likelihood_equation(rng):
    """Test that the fitted kappa satisfies A_p(kappa) = R_bar."""
    X = normalize_rows(rng.normal(size=(30, 8)) + 2.0 * np.eye(8)[0])
    fitted = vmf.estimate(X)
    r_bar = np.linalg.norm(X.sum(axis=0)) / X.shape[0]
    assert vmf.bessel_ratio(8, fitted.kappa) == pytest.approx(r_bar, abs=1e-8)
    assert np.linalg.norm(fitted.mu) == pytest.approx(1.0)


def test_sample_estimate_round_trip():
    """Test that 10,000 draws at kappa=50, p=10 recover the parameters."""
    rng = np.random.default_rng(0)
    mu = _unit(rng, 10)
    samples = vmf.sample(vmf.VmfDistribution(mu=mu, kappa=50.0), 10_000, rng)
    fitted = vmf.estimate(samples)

    assert float(fitted.mu @ mu) >= 0.999
    assert abs(fitted.kappa - 50.0) / 50.0 <= 0.1


def test_sample_uniform_when_kappa_zero(rng):
    """Test that kappa=0 gives a near-zero mean resultant length."""
    samples = vmf.sample(vmf.VmfDistribution(mu=_unit(rng, 6), kappa=0.0), 20_000, rng)
    assert np.linalg.norm(samples.mean(axis=0)) <= 0.03


def test_sample_concentrated_at_kappa_max(rng):
    """Test that every draw sits next to the mean direction at the clamp."""
    mu = _unit(rng, 10)
    samples = vmf.sample(vmf.VmfDistribution(mu=mu, kappa=vmf.KAPPA_MAX), 1000, rng)
    assert np.all(samples @ mu >= 0.99)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=50), st.floats(min_value=0.0, max_value=1e4),
       st.integers(min_value=0, max_value=2**32 - 1))
def test_sample_rows_are_unit(p, kappa, seed):
    """Test the unit-norm postcondition of the sampler."""
    rng = np.random.default_rng(seed)
    samples = vmf.sample(vmf.VmfDistribution(mu=_unit(rng, p), kappa=kappa), 20, rng)
    assert samples.shape == (20, p)
    np.testing.assert_allclose(np.linalg.norm(samples, axis=1), 1.0, atol=1e-9)


def test_log_density_uniform_is_minus_log_area(rng):
    """Test that kappa=0 gives the uniform density on S^2."""
    dist = vmf.VmfDistribution(mu=_unit(rng, 3), kappa=0.0)
    for _ in range(3):
        assert vmf.log_density(dist, _unit(rng, 3)) == pytest.approx(-math.log(4 * math.pi))


def test_log_normalizer_continuous_at_zero():
    """Test that tiny kappa approaches the kappa=0 value."""
    for p in (2, 3, 10):
        assert vmf.log_normalizer(p, 1e-8) == pytest.approx(vmf.log_normalizer(p, 0.0), rel=1e-6)


def test_log_density_finite_at_extremes(rng):
    """Test large dimension and concentration without overflow."""
    mu = _unit(rng, 300)
    for kappa in (1e-3, 1.0, 1e3, vmf.KAPPA_MAX):
        value = vmf.log_density(vmf.VmfDistribution(mu=mu, kappa=kappa), mu)
        assert np.isfinite(value)


def test_log_density_peaks_at_mean(rng):
    """Test that the mean direction is the mode."""
    mu = _unit(rng, 4)
    dist = vmf.VmfDistribution(mu=mu, kappa=5.0)
    assert vmf.log_density(dist, mu) > vmf.log_density(dist, _unit(rng, 4))


def test_log_density_closed_form_in_three_dimensions(rng):
    """Test the p=3 density against kappa / (4 pi sinh kappa) * exp(kappa mu^T x)."""
    mu = _unit(rng, 3)
    x = _unit(rng, 3)
    for kappa in (0.5, 5.0, 30.0):
        dist = vmf.VmfDistribution(mu=mu, kappa=kappa)
        normalizer = math.log(kappa / (4 * math.pi * math.sinh(kappa)))
        assert vmf.log_normalizer(3, kappa) == pytest.approx(normalizer, rel=1e-10)
        expected = normalizer + kappa * float(mu @ x)
        assert vmf.log_density(dist, x) == pytest.approx(expected, abs=1e-9)


def test_log_density_gap_between_mean_and_antipode(rng):
    """Test that the mean and its antipode differ by exactly 2 kappa in log density."""
    mu = _unit(rng, 10)
    dist = vmf.VmfDistribution(mu=mu, kappa=7.0)
    assert vmf.log_density(dist, mu) - vmf.log_density(dist, -mu) == pytest.approx(14.0)


def test_estimate_ignores_duplicated_sample():
    """Test that stacking the sample twice leaves the fit unchanged."""
    rng = np.random.default_rng(3)
    samples = vmf.sample(vmf.VmfDistribution(mu=_unit(rng, 8), kappa=10.0), 200, rng)
    single = vmf.estimate(samples)
    doubled = vmf.estimate(np.vstack([samples, samples]))

    np.testing.assert_allclose(doubled.mu, single.mu, atol=1e-12)
    assert doubled.kappa == pytest.approx(single.kappa, rel=1e-6)


def test_mean_direction_error_shrinks_with_sample_size():
    """Test that the fitted mean direction tightens as the sample grows."""
    rng = np.random.default_rng(4)
    dist = vmf.VmfDistribution(mu=_unit(rng, 5), kappa=10.0)
    errors = {}
    for n in (100, 10_000):
        fitted = vmf.estimate(vmf.sample(dist, n, rng))
        errors[n] = 1.0 - float(fitted.mu @ dist.mu)
    assert errors[10_000] < errors[100]
