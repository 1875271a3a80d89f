import logging
import math
from typing import Optional

import numpy as np
from scipy import linalg, optimize, special

from rps.core.errors import ConditioningError, DegreesOfFreedomError, ParameterError
from rps.models.dataset import RegressionDataset
from rps.models.ellipsoid import Ellipsoid

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12
# residual variance below this multiple of max(output power, 1) is rounding noise;
# the threshold is absolute (1e-24) for outputs with mean square below one
ZERO_VARIANCE_RTOL = 1e-24


def chi2_quantile(p: float, df: int, xtol: float = 1e-12) -> float:
    """Chi-square quantile by bisection on the regularized lower incomplete gamma function"""
    if not 0 <= p < 1:
        raise ParameterError(f"probability must be in [0, 1), got {p}")
    if df < 1:
        raise ParameterError(f"degrees of freedom must be positive, got {df}")
    if p == 0:
        return 0.0

    def cdf_gap(x: float) -> float:
        return special.gammainc(df / 2.0, x / 2.0) - p

    hi = max(1.0, float(df))
    while cdf_gap(hi) < 0:
        hi *= 2.0
    return optimize.bisect(cdf_gap, 0.0, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)


def least_squares(dataset: RegressionDataset) -> np.ndarray:
    gram = dataset.phi.T @ dataset.phi
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond >= MAX_CONDITION:
        raise ConditioningError(
            f"least-squares Gram matrix is near singular (condition number {cond:.3e})",
            condition_number=float(cond),
        )
    return linalg.solve(gram, dataset.phi.T @ dataset.y, assume_a="pos")


def noise_variance(dataset: RegressionDataset, theta_ls: Optional[np.ndarray] = None) -> float:
    """Unbiased residual variance RSS / (n - d)"""
    if dataset.n <= dataset.d:
        raise DegreesOfFreedomError(
            f"need more samples than parameters (n={dataset.n}, d={dataset.d})"
        )
    if theta_ls is None:
        theta_ls = least_squares(dataset)
    resid = dataset.y - dataset.phi @ theta_ls
    return float(resid @ resid) / (dataset.n - dataset.d)


def asymptotic_ellipsoid(
    dataset: RegressionDataset,
    p: float,
    noise_variance_estimate: Optional[float] = None,
) -> Ellipsoid:
    """Classical confidence ellipsoid {(theta - theta_ls)' Phi'Phi / sigma^2 (theta - theta_ls) <= chi2_d(p)}.

    A zero variance estimate gives the single point theta_ls, stored as
    shape Phi'Phi with radius 0.
    """
    if not 0 < p < 1:
        raise ParameterError(f"probability must be in (0, 1), got {p}")
    if dataset.n <= dataset.d:
        raise DegreesOfFreedomError(
            f"need more samples than parameters (n={dataset.n}, d={dataset.d})"
        )
    center = least_squares(dataset)
    sigma2 = (
        noise_variance(dataset, center)
        if noise_variance_estimate is None
        else float(noise_variance_estimate)
    )
    if sigma2 < 0 or math.isnan(sigma2):
        raise ParameterError(f"noise variance estimate must be nonnegative, got {sigma2}")
    gram = dataset.phi.T @ dataset.phi
    if sigma2 <= ZERO_VARIANCE_RTOL * max(float(np.mean(dataset.y**2)), 1.0):
        return Ellipsoid(center=center, shape=gram, radius=0.0)
    return Ellipsoid(center=center, shape=gram / sigma2, radius=chi2_quantile(p, dataset.d))
