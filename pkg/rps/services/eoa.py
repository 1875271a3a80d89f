"""Ellipsoidal outer-approximation of a perturbed-sums region.

With x = R_n^{-1/2} V_n (theta - theta_hat) the reference sum satisfies
||S_0||^2 = ||x||^2 and the i-th comparison ||S_0||^2 <= ||S_i||^2
becomes the quadratic constraint x'A_i x + 2 b_i'x + c_i <= 0. The
largest ||x||^2 on that set is bounded by an S-procedure LMI in
(lambda, gamma); the radius is the q-th largest of the m-1 optimal
values. Each LMI is reduced to a convex one-dimensional problem in
lambda via the Schur complement.
"""

import logging
import math
from typing import Optional

import numpy as np
from joblib import Parallel, delayed
from scipy import linalg, optimize

from rps.core.config import settings
from rps.core.errors import ConditioningError, ParameterError, ShapeError
from rps.models.dataset import RegressionDataset
from rps.models.ellipsoid import Ellipsoid, LmiProblem, PerturbedAggregates, is_symmetric
from rps.models.state import PerturbationState

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12
PINV_RTOL = 1e-10
RANGE_TOL = 1e-12
LAMBDA_GROWTH = 2.0
MAX_GROWTH_STEPS = 200
# rounding band below a zero asymptotic slope, relative to b'A^{-1}b + |c|
SLOPE_RTOL = 1e-12


def correlation_estimate(dataset: RegressionDataset, psi: np.ndarray) -> np.ndarray:
    """theta_hat solving sum_t psi_t (Y_t - phi_t' theta) = 0; least squares when psi = phi"""
    psi = np.asarray(psi, dtype=float)
    if psi.shape != dataset.phi.shape:
        raise ShapeError(f"co-regressors have shape {psi.shape}, expected {dataset.phi.shape}")
    gram = psi.T @ dataset.phi
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond >= MAX_CONDITION:
        raise ConditioningError(
            f"co-regressor/regressor correlation matrix is near singular "
            f"(condition number {cond:.3e})",
            condition_number=float(cond),
        )
    return linalg.solve(gram, psi.T @ dataset.y)


def perturbed_aggregates(state: PerturbationState) -> PerturbedAggregates:
    """(1/n) Psi' P_i Phi and (1/n) Psi' P_i y with the state's own perturbations"""
    n, d, m = state.n, state.d, state.m
    phi, y = state.dataset.phi, state.dataset.y
    q = np.empty((m, d, d))
    xi = np.empty((m, d))
    for i in range(m):
        q[i] = state.psi.T @ state.perturb(phi, i) / n
        xi[i] = state.psi.T @ state.perturb(y, i) / n
    return PerturbedAggregates(q=q, xi=xi)


def lmi_problem(
    i: int,
    state: PerturbationState,
    aggregates: PerturbedAggregates,
    theta_hat: np.ndarray,
) -> LmiProblem:
    """A_i, b_i, c_i for perturbation i in 1..m-1"""
    if not 1 <= i < state.m:
        raise ParameterError(f"perturbation index must be in 1..{state.m - 1}, got {i}")
    v_n = aggregates.v_n
    cond = np.linalg.cond(v_n)
    if not np.isfinite(cond) or cond >= MAX_CONDITION:
        raise ConditioningError(
            f"V_n is near singular (condition number {cond:.3e})",
            condition_number=float(cond),
        )
    q_i, xi_i = aggregates.q[i], aggregates.xi[i]
    r_inv = state.r_half_inv @ state.r_half_inv

    # G maps x to the theta-dependent part of R^{-1/2} S-argument
    v_inv_r_half = linalg.solve(v_n, state.r_half)
    g = state.r_half_inv @ q_i @ v_inv_r_half
    A = np.eye(state.d) - g.T @ g
    residual = xi_i - q_i @ theta_hat
    b = v_inv_r_half.T @ q_i.T @ r_inv @ residual
    c = -float(residual @ r_inv @ residual)
    return LmiProblem(A=(A + A.T) / 2.0, b=b, c=c)


def _gamma_curve(eigvals: np.ndarray, beta: np.ndarray, c: float):
    """gamma(lambda) = lambda^2 b'(-I + lambda A)^+ b - lambda c in the eigenbasis of A"""
    beta2 = beta**2

    def gamma(lam: float) -> float:
        diag = lam * eigvals - 1.0
        scale = max(1.0, float(np.max(np.abs(diag))))
        null = np.abs(diag) <= PINV_RTOL * scale
        if np.any(null & (beta2 > RANGE_TOL * max(1.0, beta2.sum()))):
            # lambda * b is not in the range of -I + lambda A
            return math.inf
        terms = np.where(null, 0.0, beta2 / np.where(null, 1.0, diag))
        return float(lam * lam * terms.sum() - lam * c)

    return gamma


def solve_lmi(prob: LmiProblem, tol: Optional[float] = None) -> float:
    """Optimal gamma of the LMI; +inf if infeasible, -inf if unbounded below"""
    tol = settings.LMI_TOL if tol is None else tol
    if not tol > 0:
        raise ParameterError(f"tolerance must be positive, got {tol}")
    if not is_symmetric(prob.A):
        raise ParameterError("LMI matrix A must be symmetric")

    eigvals, eigvecs = linalg.eigh(prob.A)
    lam_min = eigvals[0]
    if lam_min <= 0:
        # -I + lambda A can never be psd
        return math.inf

    beta = eigvecs.T @ prob.b
    c = prob.c
    # gamma(lambda) = lambda * slope + const + vanishing terms as lambda grows
    quad = float(np.sum(beta**2 / eigvals))
    slope = quad - c
    if slope < -SLOPE_RTOL * (quad + abs(c)):
        return -math.inf
    if slope <= 0.0:
        # infimum is only approached as lambda -> inf
        return float(np.sum(beta**2 / eigvals**2))

    gamma = _gamma_curve(eigvals, beta, c)
    lo = 1.0 / lam_min
    hi = LAMBDA_GROWTH * lo
    for _ in range(MAX_GROWTH_STEPS):
        if gamma(LAMBDA_GROWTH * hi) > gamma(hi):
            break
        hi *= LAMBDA_GROWTH
    hi *= LAMBDA_GROWTH

    result = optimize.minimize_scalar(
        gamma,
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": tol * hi, "maxiter": 500},
    )
    # every lambda gives a valid upper bound; keep the best one seen
    best = min(float(result.fun), gamma(lo), gamma(hi))
    return best


def lmi_values(
    state: PerturbationState,
    tol: Optional[float] = None,
    n_jobs: int = 1,
    theta_hat: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Optimal values of the m-1 LMIs, in perturbation order"""
    if theta_hat is None:
        theta_hat = correlation_estimate(state.dataset, state.psi)
    aggregates = perturbed_aggregates(state)
    problems = [lmi_problem(i, state, aggregates, theta_hat) for i in range(1, state.m)]
    if n_jobs == 1:
        values = [solve_lmi(prob, tol) for prob in problems]
    else:
        values = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(solve_lmi)(prob, tol) for prob in problems
        )
    return np.array(values, dtype=float)


def radius_from_values(values: np.ndarray, q: int) -> float:
    """q-th largest value; -inf counts as +inf so the outer guarantee is kept"""
    ordered = np.where(np.isneginf(values), np.inf, values)
    r = float(np.sort(ordered)[::-1][q - 1])
    return max(r, 0.0)


def outer_approximation(
    state: PerturbationState, tol: Optional[float] = None, n_jobs: int = 1
) -> Ellipsoid:
    """Ellipsoid {||R^{-1/2} V_n (theta - theta_hat)||^2 <= r} containing the region"""
    theta_hat = correlation_estimate(state.dataset, state.psi)
    values = lmi_values(state, tol, n_jobs=n_jobs, theta_hat=theta_hat)
    unbounded = int(np.sum(~np.isfinite(values)))
    if unbounded:
        logger.info("%d of %d LMI instances are infeasible or unbounded", unbounded, values.size)
    v_n = state.psi.T @ state.dataset.phi / state.n
    r_inv = state.r_half_inv @ state.r_half_inv
    shape = v_n.T @ r_inv @ v_n
    return Ellipsoid(center=theta_hat, shape=shape, radius=radius_from_values(values, state.q))


def ellipsoid_contains_batch(e: Ellipsoid, thetas: np.ndarray) -> np.ndarray:
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if thetas.shape[1] != e.d:
        raise ShapeError(f"parameters have dimension {thetas.shape[1]}, ellipsoid has {e.d}")
    if not e.bounded:
        return np.ones(thetas.shape[0], dtype=bool)
    delta = thetas - e.center
    return np.einsum("kd,de,ke->k", delta, e.shape, delta) <= e.radius


def ellipsoid_contains(e: Ellipsoid, theta: np.ndarray) -> int:
    return int(ellipsoid_contains_batch(e, np.asarray(theta, dtype=float)[None, :])[0])


def ellipse_boundary(e: Ellipsoid, k: int = 200) -> np.ndarray:
    """k points on the boundary of a bounded planar ellipse"""
    if e.d != 2:
        raise ShapeError("boundary points are only produced for d = 2")
    if not e.bounded:
        raise ParameterError("an unbounded ellipsoid has no boundary")
    angles = np.linspace(0.0, 2.0 * np.pi, k, endpoint=False)
    circle = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    eigvals, eigvecs = linalg.eigh(e.shape)
    if eigvals.min() <= 0:
        raise ConditioningError("ellipse shape matrix is not positive definite")
    # shape^{-1/2} maps the unit circle onto {x' shape x = 1}
    inv_root = (eigvecs / np.sqrt(eigvals)) @ eigvecs.T
    return e.center + math.sqrt(e.radius) * circle @ inv_root.T


def ellipse_area(e: Ellipsoid) -> float:
    if e.d != 2:
        raise ShapeError("closed-form area is only available for d = 2")
    if not e.bounded:
        return math.inf
    det = float(np.linalg.det(e.shape))
    if det <= 0:
        raise ConditioningError("ellipse shape matrix is not positive definite")
    return math.pi * e.radius / math.sqrt(det)
