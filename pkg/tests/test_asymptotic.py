import math

import numpy as np
import pytest
from scipy import stats

from rps.core.errors import DegreesOfFreedomError, ParameterError
from rps.models.dataset import RegressionDataset
from rps.services.asymptotic import asymptotic_ellipsoid, chi2_quantile, least_squares, noise_variance
from rps.services.eoa import ellipsoid_contains
from rps.services.simulation import simulate_fir


def test_chi2_quantile_two_degrees_of_freedom():
    assert chi2_quantile(0.9, 2) == pytest.approx(-2.0 * math.log(0.1), abs=1e-3)
    assert chi2_quantile(0.9, 2) == pytest.approx(4.6052, abs=1e-3)


@pytest.mark.parametrize("df", [1, 3, 7])
@pytest.mark.parametrize("p", [0.1, 0.5, 0.95])
def test_chi2_quantile_matches_scipy(p, df):
    assert chi2_quantile(p, df) == pytest.approx(stats.chi2.ppf(p, df), rel=1e-8)


def test_chi2_quantile_limits():
    assert chi2_quantile(0.0, 2) == 0.0
    assert chi2_quantile(1e-9, 2) < 1e-6
    with pytest.raises(ParameterError):
        chi2_quantile(1.0, 2)


def test_noise_variance_is_unbiased_estimate(laplace_system):
    ds = simulate_fir(laplace_system, 5000, seed=1)
    assert noise_variance(ds) == pytest.approx(1.0, rel=0.1)


def test_ellipsoid_is_centered_at_least_squares(dataset):
    e = asymptotic_ellipsoid(dataset, 0.9)
    np.testing.assert_allclose(e.center, least_squares(dataset))
    assert e.radius == pytest.approx(4.6052, abs=1e-3)
    np.testing.assert_allclose(e.shape, dataset.phi.T @ dataset.phi / noise_variance(dataset))


def test_zero_noise_gives_a_point(zero_noise_system):
    ds = simulate_fir(zero_noise_system, 30, seed=0)
    e = asymptotic_ellipsoid(ds, 0.9)
    assert e.radius == 0.0
    np.testing.assert_allclose(e.center, [5.0, 1.0])
    assert ellipsoid_contains(e, e.center) == 1
    assert ellipsoid_contains(e, e.center + [1e-3, 0.0]) == 0


def test_zero_variance_threshold_is_absolute_for_small_outputs():
    rng = np.random.default_rng(5)
    phi = 1e-2 * rng.standard_normal((30, 2))
    clean = phi @ np.array([1.0, 1.0])
    # residual variance near 1e-30 is far below 1e-24 but above 1e-24 * mean(y^2)
    tiny = RegressionDataset(phi=phi, y=clean + 1e-15 * rng.standard_normal(30))
    assert asymptotic_ellipsoid(tiny, 0.9).radius == 0.0
    small = RegressionDataset(phi=phi, y=clean + 1e-6 * rng.standard_normal(30))
    assert asymptotic_ellipsoid(small, 0.9).radius == pytest.approx(chi2_quantile(0.9, 2))


def test_degrees_of_freedom(toy_dataset):
    short = RegressionDataset(phi=toy_dataset.phi[:2], y=toy_dataset.y[:2])
    with pytest.raises(DegreesOfFreedomError):
        asymptotic_ellipsoid(short, 0.9)
    with pytest.raises(ParameterError):
        asymptotic_ellipsoid(toy_dataset, 1.5)
