"""Sign-Perturbed Sums baseline.

Same reference sum, rank statistic and indicator as RPS; the perturbed
sums flip the signs of the residual terms with i.i.d. Rademacher
vectors instead of permuting them. Exact coverage needs noise that is
symmetric about zero.
"""

import logging
from typing import Optional

import numpy as np

from rps.core import random
from rps.core.errors import ParameterError, ShapeError
from rps.models.dataset import RegressionDataset
from rps.models.state import SpsState
from rps.schemas.experiment import RpsConfig
from rps.services.region import _check_levels, _prepare, draw_tiebreak, s_values

logger = logging.getLogger(__name__)


def build_sps_state(
    config: RpsConfig,
    dataset: RegressionDataset,
    signs: np.ndarray,
    tiebreak: np.ndarray,
    psi: Optional[np.ndarray] = None,
) -> SpsState:
    _check_levels(config)
    signs = np.array(signs, dtype=float).reshape(config.m - 1, dataset.n)
    if not np.isin(signs, (-1.0, 1.0)).all():
        raise ParameterError("sign vectors may only contain -1 and +1")
    tiebreak = np.array(tiebreak, dtype=np.intp)
    if not np.array_equal(np.sort(tiebreak), np.arange(config.m)):
        raise ParameterError("tie-break order must be a permutation of 0..m-1")
    signs.setflags(write=False)
    tiebreak.setflags(write=False)

    psi, shaping, r_half, r_half_inv = _prepare(config, dataset, psi)
    return SpsState(
        dataset=dataset,
        config=config,
        psi=psi,
        shaping=shaping,
        r_half=r_half,
        r_half_inv=r_half_inv,
        tiebreak=tiebreak,
        signs=signs,
    )


def initialize_sps(
    config: RpsConfig, dataset: RegressionDataset, psi: Optional[np.ndarray] = None
) -> SpsState:
    _check_levels(config)
    rng = random.stream(config.seed, random.SIGNS)
    signs = 2.0 * rng.integers(0, 2, size=(config.m - 1, dataset.n)) - 1.0
    tiebreak = draw_tiebreak(config.m, config.seed)
    return build_sps_state(config, dataset, signs, tiebreak, psi=psi)


def sps_s_values(theta: np.ndarray, state: SpsState) -> list[np.ndarray]:
    """[S_0, S_1, ...] with S_i = R_n^{-1/2} (1/n) sum_t alpha_{i,t} psi_t eps_t(theta)"""
    if not isinstance(state, SpsState):
        raise ShapeError("sign-perturbed sums need a state with sign vectors")
    return s_values(theta, state)
