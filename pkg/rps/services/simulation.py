"""Data generation and the user-chosen ingredients of a region.

The FIR benchmark: V_t ~ N(0, 1), U_t = sum_i c_i V_{t-i+1},
phi_t = [U_{t-1}, ..., U_{t-d}], Y_t = phi_t' theta* + W_t. Innovations
before the sample start are drawn from the same law so that phi_1 is
fully defined and the regressor sequence is stationary.
"""

import logging
from typing import Optional, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import signal

from rps.core import random
from rps.core.errors import MatrixValidationError, NotPsdError, ParameterError, ShapeError
from rps.models.dataset import RegressionDataset
from rps.models.ellipsoid import is_symmetric
from rps.schemas.experiment import (
    CoregressorKind,
    CoregressorSpec,
    ShapingKind,
    ShapingSpec,
)
from rps.schemas.system import NoiseFamily, NoiseSpec, TrueSystem

logger = logging.getLogger(__name__)

PSD_TOL = 1e-10


def predict(phi: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """phi @ theta for a (k, d) stack of parameters, returned as (n, k)"""
    return phi @ np.atleast_2d(thetas).T


def sample_noise(spec: NoiseSpec, n: int, seed: random.Seed) -> np.ndarray:
    """n i.i.d. draws from the noise stream of ``seed``"""
    if n < 0:
        raise ParameterError(f"sample size must be nonnegative, got {n}")
    rng = random.stream(seed, random.NOISE)
    if spec.family == NoiseFamily.CUSTOM:
        draws = np.asarray(spec.sampler(rng, n), dtype=float)
        if draws.shape != (n,):
            raise ShapeError(f"noise sampler returned shape {draws.shape}, expected ({n},)")
        return draws

    scale = spec.effective_scale
    if not scale > 0:
        raise ParameterError(f"noise scale must be positive, got {scale}")
    if spec.family == NoiseFamily.GAUSSIAN:
        return rng.normal(spec.loc, scale, size=n)
    if spec.family == NoiseFamily.LAPLACE:
        return rng.laplace(spec.loc, scale, size=n)
    if spec.family == NoiseFamily.EXPONENTIAL:
        return spec.loc + rng.exponential(scale, size=n)
    raise ParameterError(f"unknown noise family {spec.family}")


def simulate_fir(system: TrueSystem, n: int, seed: random.Seed) -> RegressionDataset:
    if n < 1:
        raise ParameterError(f"sample size must be positive, got {n}")
    c = np.asarray(system.input_filter, dtype=float)
    if c.size == 0:
        raise ParameterError("input filter must be nonempty")
    d = system.order

    # U_{1-d}, ..., U_{n-1} need len(c) - 1 extra innovations before them
    rng = random.stream(seed, random.INPUT)
    v = rng.standard_normal(n + d - 1 + c.size - 1)
    u = signal.lfilter(c, [1.0], v)[c.size - 1 :]

    # row t holds [U_{t-1}, ..., U_{t-d}]
    phi = np.ascontiguousarray(sliding_window_view(u, d)[:, ::-1])
    noise = sample_noise(system.noise, n, seed)
    y = predict(phi, system.theta)[:, 0] + noise
    return RegressionDataset(phi=phi, y=y)


def simulate_signed_regressor(
    theta_star: Union[list, np.ndarray], n: int, seed: random.Seed
) -> RegressionDataset:
    """Heteroscedastic system Y_t = phi_t' theta* + |phi_{t,1}| N_t.

    The noise depends on the regressor, but sign(phi_t) is independent
    of it, so the ``sign`` co-regressor keeps coverage exact.
    """
    if n < 1:
        raise ParameterError(f"sample size must be positive, got {n}")
    theta = np.atleast_1d(np.asarray(theta_star, dtype=float))
    phi = random.stream(seed, random.REGRESSORS).standard_normal((n, theta.size))
    noise = np.abs(phi[:, 0]) * random.stream(seed, random.NOISE).standard_normal(n)
    y = predict(phi, theta)[:, 0] + noise
    return RegressionDataset(phi=phi, y=y)


def build_coregressors(
    dataset: RegressionDataset,
    strategy: Union[CoregressorSpec, CoregressorKind, str] = CoregressorKind.IDENTITY,
    matrix: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Co-regressor rows psi_t for every strategy; ``matrix`` overrides the one in a CoregressorSpec"""
    spec = _coregressor_spec(strategy, matrix)
    phi = dataset.phi
    kind = spec.kind

    if kind == CoregressorKind.IDENTITY:
        return phi.copy()
    if kind == CoregressorKind.SIGN:
        return np.sign(phi)
    if kind == CoregressorKind.CENTERED_EMPIRICAL:
        return phi - phi.mean(axis=0)
    if kind == CoregressorKind.CENTERED_KNOWN_MEAN:
        mean = np.asarray(spec.mean, dtype=float).ravel()
        if mean.size == 1:
            mean = np.full(dataset.d, mean[0])
        if mean.size != dataset.d:
            raise ShapeError(f"known mean has {mean.size} entries, expected {dataset.d}")
        return phi - mean

    supplied = np.asarray(matrix if matrix is not None else spec.matrix, dtype=float)
    if supplied.shape != phi.shape:
        raise ShapeError(f"co-regressor matrix has shape {supplied.shape}, expected {phi.shape}")
    if kind == CoregressorKind.CENTERED_REFERENCE:
        return phi - supplied
    return supplied.copy()


def _coregressor_spec(strategy, matrix) -> CoregressorSpec:
    if isinstance(strategy, CoregressorSpec):
        return strategy
    kind = CoregressorKind(strategy)
    if kind in (CoregressorKind.USER, CoregressorKind.CENTERED_REFERENCE):
        if matrix is None:
            raise ParameterError(f"{kind.value} co-regressors need a matrix")
        # payload arrives through ``matrix``
        return CoregressorSpec.model_construct(kind=kind, mean=None, matrix=None)
    if kind == CoregressorKind.CENTERED_KNOWN_MEAN:
        raise ParameterError("centered-known-mean needs a CoregressorSpec with the mean")
    return CoregressorSpec(kind=kind)


def shaping_matrix(
    dataset: RegressionDataset,
    choice: Union[ShapingSpec, ShapingKind, str] = ShapingKind.EMPIRICAL_GRAM,
    matrix: Optional[np.ndarray] = None,
) -> np.ndarray:
    """The d x d shaping matrix R_n"""
    if isinstance(choice, ShapingSpec):
        kind = choice.kind
        if matrix is None and choice.matrix is not None:
            matrix = np.asarray(choice.matrix, dtype=float)
    else:
        kind = ShapingKind(choice)

    if kind == ShapingKind.IDENTITY:
        return np.eye(dataset.d)
    if kind == ShapingKind.EMPIRICAL_GRAM:
        return dataset.phi.T @ dataset.phi / dataset.n

    if matrix is None:
        raise ParameterError("user shaping needs a matrix")
    r = np.asarray(matrix, dtype=float)
    if r.shape != (dataset.d, dataset.d):
        raise ShapeError(f"shaping matrix has shape {r.shape}, expected {(dataset.d, dataset.d)}")
    if not is_symmetric(r, PSD_TOL):
        raise MatrixValidationError("shaping matrix must be symmetric")
    if np.linalg.eigvalsh((r + r.T) / 2.0).min() < -PSD_TOL:
        raise NotPsdError("shaping matrix must be positive semidefinite")
    return r.copy()
