import numpy as np
import pytest

from rps.core.errors import ParameterError, ShapeError
from rps.schemas.experiment import RpsConfig
from rps.services import region
from rps.services.asymptotic import least_squares
from rps.services.sps import build_sps_state, initialize_sps, sps_s_values


@pytest.fixture
def sps_state(rps_config, dataset):
    return initialize_sps(rps_config, dataset)


def test_signs_are_rademacher(sps_state):
    assert sps_state.signs.shape == (9, 250)
    assert set(np.unique(sps_state.signs)) == {-1.0, 1.0}


def test_all_plus_signs_reproduce_reference_sum(dataset):
    state = build_sps_state(RpsConfig(m=3, q=1), dataset, np.ones((2, 250)), [0, 1, 2])
    sums = sps_s_values(np.array([4.0, 2.0]), state)
    np.testing.assert_array_equal(sums[1], sums[0])
    np.testing.assert_array_equal(sums[2], sums[0])


def test_reference_sum_vanishes_at_least_squares(sps_state, dataset):
    sums = sps_s_values(least_squares(dataset), sps_state)
    np.testing.assert_allclose(sums[0], 0.0, atol=1e-10)


def test_flipping_all_signs_keeps_norms(dataset):
    signs = np.where(np.random.default_rng(3).random((4, 250)) < 0.5, -1.0, 1.0)
    state = build_sps_state(RpsConfig(m=5, q=1), dataset, signs, np.arange(5))
    flipped = build_sps_state(RpsConfig(m=5, q=1), dataset, -signs, np.arange(5))
    theta = np.array([4.5, 1.5])
    for a, b in zip(sps_s_values(theta, state)[1:], sps_s_values(theta, flipped)[1:]):
        np.testing.assert_allclose(b, -a)
        assert a @ a == pytest.approx(b @ b)


def test_sign_vectors_are_validated(dataset):
    with pytest.raises(ParameterError):
        build_sps_state(RpsConfig(m=2, q=1), dataset, np.zeros((1, 250)), [0, 1])


def test_rps_state_is_rejected(state):
    with pytest.raises(ShapeError):
        sps_s_values(np.zeros(2), state)


def test_snapshot_round_trip(sps_state, dataset):
    restored = region.restore(region.snapshot(sps_state), dataset)
    np.testing.assert_array_equal(restored.signs, sps_state.signs)
    thetas = least_squares(dataset) + np.random.default_rng(4).normal(scale=0.3, size=(50, 2))
    np.testing.assert_array_equal(region.rank_batch(thetas, restored), region.rank_batch(thetas, sps_state))
