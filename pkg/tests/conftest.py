import numpy as np
import pytest

from rps.models.dataset import RegressionDataset
from rps.schemas.experiment import ExperimentConfig, RpsConfig
from rps.schemas.system import BENCHMARK_FILTER, BENCHMARK_THETA, NoiseSpec, TrueSystem
from rps.services.region import initialize
from rps.services.simulation import simulate_fir


@pytest.fixture
def theta_star():
    return np.array(BENCHMARK_THETA)


@pytest.fixture
def laplace_system():
    return TrueSystem(
        theta_star=BENCHMARK_THETA,
        noise=NoiseSpec.laplace(0.0, 1.0),
        input_filter=BENCHMARK_FILTER,
    )


@pytest.fixture
def zero_noise_system():
    return TrueSystem(
        theta_star=BENCHMARK_THETA,
        noise=NoiseSpec.custom(lambda rng, n: np.zeros(n)),
        input_filter=BENCHMARK_FILTER,
    )


@pytest.fixture
def dataset(laplace_system):
    return simulate_fir(laplace_system, 250, seed=3)


@pytest.fixture
def small_dataset(laplace_system):
    return simulate_fir(laplace_system, 30, seed=11)


@pytest.fixture
def rps_config():
    return RpsConfig(m=10, q=1, seed=5)


@pytest.fixture
def state(rps_config, dataset):
    return initialize(rps_config, dataset)


@pytest.fixture
def toy_dataset():
    phi = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, -1.0], [0.5, 0.5]])
    y = np.array([1.0, 2.0, 2.5, 0.3, 1.4])
    return RegressionDataset(phi=phi, y=y)


@pytest.fixture
def small_experiment():
    """Cheap FIR study used by the harness and CLI tests"""
    return ExperimentConfig(
        name="small",
        noise="gaussian",
        noise_variance=1.0,
        n_list=[25],
        m=10,
        q=1,
        trials=50,
        grid_resolution=30,
        seed=17,
    )
