"""Residual-Permuted Sums: initialisation and the region indicator.

A state freezes the randomisation (m-1 uniform permutations of the
sample and a uniform tie-break order of {0, ..., m-1}) so that every
parameter queried is judged with the same draws. The region is the set
of parameters whose reference sum is not among the q largest.
"""

import logging
from typing import Optional

import numpy as np
from scipy import linalg

from rps.core import random
from rps.core.config import settings
from rps.core.errors import (
    ConditioningError,
    MatrixValidationError,
    NotPsdError,
    ParameterError,
    ShapeError,
)
from rps.models.dataset import RegressionDataset
from rps.models.ellipsoid import is_symmetric
from rps.models.state import PerturbationState, RpsState
from rps.schemas.experiment import RpsConfig
from rps.schemas.report import StateSnapshot
from rps.services.simulation import build_coregressors, predict, shaping_matrix

logger = logging.getLogger(__name__)

EIG_TOL = 1e-10


def principal_sqrt(R: np.ndarray) -> np.ndarray:
    """Symmetric psd square root by spectral decomposition"""
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {R.shape}")
    if not is_symmetric(R, EIG_TOL):
        raise MatrixValidationError("matrix must be symmetric")
    eigvals, eigvecs = linalg.eigh((R + R.T) / 2.0)
    if eigvals.min(initial=0.0) < -EIG_TOL:
        raise NotPsdError(f"matrix has negative eigenvalue {eigvals.min():.3e}")
    root = (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.T
    return (root + root.T) / 2.0


def _inverse_sqrt(R: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = linalg.eigh((R + R.T) / 2.0)
    if eigvals.min() <= EIG_TOL:
        raise ConditioningError(
            f"shaping matrix is singular (min eigenvalue {eigvals.min():.3e}); "
            "its inverse square root is required",
            condition_number=float(np.inf if eigvals.min() <= 0 else eigvals.max() / eigvals.min()),
        )
    root = (eigvecs / np.sqrt(eigvals)) @ eigvecs.T
    return (root + root.T) / 2.0


def _check_levels(config: RpsConfig) -> None:
    # configs built with model_construct skip validation
    if not (config.m > config.q > 0):
        raise ParameterError(f"need m > q > 0, got m={config.m}, q={config.q}")


def draw_tiebreak(m: int, seed: random.Seed) -> np.ndarray:
    return random.stream(seed, random.TIEBREAK).permutation(m)


def _prepare(config: RpsConfig, dataset: RegressionDataset, psi: Optional[np.ndarray]):
    _check_levels(config)
    psi = build_coregressors(dataset, config.coregressor, matrix=psi)
    shaping = shaping_matrix(dataset, config.shaping)
    r_half_inv = _inverse_sqrt(shaping)
    r_half = principal_sqrt(shaping)
    return psi, shaping, r_half, r_half_inv


def build_state(
    config: RpsConfig,
    dataset: RegressionDataset,
    perms: np.ndarray,
    tiebreak: np.ndarray,
    psi: Optional[np.ndarray] = None,
) -> RpsState:
    """State from explicit randomisation (used by initialize and by snapshots)"""
    perms = np.array(perms, dtype=np.intp).reshape(config.m - 1, dataset.n)
    tiebreak = np.array(tiebreak, dtype=np.intp)
    identity = np.arange(dataset.n)
    if any(not np.array_equal(np.sort(perm), identity) for perm in perms):
        raise ParameterError("every stored permutation must be a bijection on the sample")
    if not np.array_equal(np.sort(tiebreak), np.arange(config.m)):
        raise ParameterError("tie-break order must be a permutation of 0..m-1")
    perms.setflags(write=False)
    tiebreak.setflags(write=False)

    psi, shaping, r_half, r_half_inv = _prepare(config, dataset, psi)
    return RpsState(
        dataset=dataset,
        config=config,
        psi=psi,
        shaping=shaping,
        r_half=r_half,
        r_half_inv=r_half_inv,
        tiebreak=tiebreak,
        perms=perms,
    )


def initialize(
    config: RpsConfig, dataset: RegressionDataset, psi: Optional[np.ndarray] = None
) -> RpsState:
    """Draw m-1 uniform permutations and the tie-break order from ``config.seed``.

    ``psi`` supplies the co-regressor matrix for the ``user`` and
    ``centered-reference`` strategies.
    """
    _check_levels(config)
    rng = random.stream(config.seed, random.PERMUTATIONS)
    perms = np.stack([rng.permutation(dataset.n) for _ in range(config.m - 1)])
    tiebreak = draw_tiebreak(config.m, config.seed)
    state = build_state(config, dataset, perms, tiebreak, psi=psi)
    logger.debug("initialised RPS state m=%d q=%d n=%d", config.m, config.q, dataset.n)
    return state


def residuals(theta: np.ndarray, dataset: RegressionDataset) -> np.ndarray:
    """Prediction errors Y_t - phi_t' theta"""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (dataset.d,):
        raise ShapeError(f"theta has shape {theta.shape}, expected ({dataset.d},)")
    return dataset.y - predict(dataset.phi, theta[None, :])[:, 0]


def _as_thetas(thetas: np.ndarray, d: int) -> np.ndarray:
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim == 1:
        thetas = thetas[None, :]
    if thetas.ndim != 2 or thetas.shape[1] != d:
        raise ShapeError(f"parameters have shape {thetas.shape}, expected (k, {d})")
    return thetas


def s_values_batch(thetas: np.ndarray, state: PerturbationState) -> np.ndarray:
    """All m shaped sums for k parameters at once, shape (m, k, d).

    Residuals are formed once per parameter; each perturbation then
    reuses the same psi and R_n^{-1/2}.
    """
    thetas = _as_thetas(thetas, state.d)
    eps = state.dataset.y[:, None] - predict(state.dataset.phi, thetas)
    scale = state.r_half_inv / state.n
    out = np.empty((state.m, thetas.shape[0], state.d))
    for i in range(state.m):
        sums = state.psi.T @ state.perturb(eps, i)
        out[i] = (scale @ sums).T
    return out


def s_values(theta: np.ndarray, state: PerturbationState) -> list[np.ndarray]:
    """[S_0(theta), ..., S_{m-1}(theta)]"""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (state.d,):
        raise ShapeError(f"theta has shape {theta.shape}, expected ({state.d},)")
    batch = s_values_batch(theta[None, :], state)
    return [batch[i, 0] for i in range(state.m)]


def rank_from_norms(norms: np.ndarray, tiebreak: np.ndarray) -> np.ndarray:
    """Rank of row 0 among the m rows of ``norms`` (shape (m,) or (m, k)).

    Row 0 beats row i when its squared norm is larger, or equal and its
    tie-break label is larger. Equality is exact.
    """
    norms = np.asarray(norms)
    ref = norms[0]
    others = norms[1:]
    wins_tie = (tiebreak[0] > tiebreak[1:]).reshape((-1,) + (1,) * (norms.ndim - 1))
    beats = (ref > others) | ((ref == others) & wins_tie)
    return 1 + beats.sum(axis=0)


def rank_batch(thetas: np.ndarray, state: PerturbationState) -> np.ndarray:
    sums = s_values_batch(thetas, state)
    norms = np.einsum("mkd,mkd->mk", sums, sums)
    return rank_from_norms(norms, state.tiebreak)


def rank(theta: np.ndarray, state: PerturbationState) -> int:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (state.d,):
        raise ShapeError(f"theta has shape {theta.shape}, expected ({state.d},)")
    return int(rank_batch(theta[None, :], state)[0])


def indicator_batch(
    thetas: np.ndarray, state: PerturbationState, chunk: Optional[int] = None
) -> np.ndarray:
    """Region membership for a (k, d) stack of parameters, evaluated in chunks"""
    thetas = _as_thetas(thetas, state.d)
    chunk = chunk or settings.EVAL_CHUNK
    out = np.empty(thetas.shape[0], dtype=bool)
    for start in range(0, thetas.shape[0], chunk):
        stop = start + chunk
        out[start:stop] = rank_batch(thetas[start:stop], state) <= state.m - state.q
    return out


def indicator(theta: np.ndarray, state: PerturbationState) -> int:
    """1 if theta is in the confidence region, else 0"""
    return int(rank(theta, state) <= state.m - state.q)


def snapshot(state: PerturbationState) -> StateSnapshot:
    payload = dict(
        kind=state.kind,
        config=state.config.model_dump(mode="json"),
        seed=state.config.seed,
        n=state.n,
        tiebreak=state.tiebreak.tolist(),
    )
    if state.kind == "rps":
        payload["permutations"] = state.perms.tolist()
    else:
        payload["signs"] = state.signs.astype(int).tolist()
    return StateSnapshot(**payload)


def restore(
    snap: StateSnapshot, dataset: RegressionDataset, psi: Optional[np.ndarray] = None
) -> PerturbationState:
    """Rebuild a state from a snapshot and the dataset it was drawn for"""
    if snap.n != dataset.n:
        raise ShapeError(f"snapshot is for n={snap.n}, dataset has n={dataset.n}")
    config = RpsConfig.model_validate(snap.config)
    if snap.kind == "sps":
        from rps.services.sps import build_sps_state

        return build_sps_state(config, dataset, np.array(snap.signs), np.array(snap.tiebreak), psi=psi)
    return build_state(config, dataset, np.array(snap.permutations), np.array(snap.tiebreak), psi=psi)
