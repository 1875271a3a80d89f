"""Monte Carlo studies of coverage and region size.

Every trial builds a fresh dataset and fresh randomisation from a seed
derived from (master seed, n, trial), so results do not depend on how
the work pool schedules trials. Trials that hit a numerical error are
left out of the coverage denominators and counted separately.
"""

import hashlib
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from rps.core import random
from rps.core.config import settings
from rps.core.errors import RpsError
from rps.models.dataset import RegressionDataset
from rps.models.ellipsoid import Ellipsoid
from rps.models.state import PerturbationState
from rps.schemas.experiment import Baseline, ExperimentConfig, GridSpec
from rps.schemas.report import EllipsoidRecord, ExperimentReport, GridMask, MethodSummary
from rps.services.asymptotic import asymptotic_ellipsoid, least_squares, noise_variance
from rps.services.eoa import ellipse_area, ellipsoid_contains_batch, outer_approximation
from rps.services.region import indicator_batch, initialize, rank
from rps.services.simulation import simulate_fir, simulate_signed_regressor
from rps.services.sps import initialize_sps

logger = logging.getLogger(__name__)

RPS = "rps"
SPS = "sps"
RPS_EOA = "rps-eoa"
SPS_EOA = "sps-eoa"
ASYMPTOTIC = "asymptotic"
METHOD_ORDER = (RPS, SPS, RPS_EOA, SPS_EOA, ASYMPTOTIC)


def method_key(method: str, n: int) -> str:
    return f"{method}@n={n}"


def simulate(config: ExperimentConfig, n: int, seed: random.Seed) -> RegressionDataset:
    if config.system == "heteroscedastic":
        return simulate_signed_regressor(config.theta_star, n, seed)
    return simulate_fir(config.true_system(), n, seed)


def default_grid(
    dataset: RegressionDataset, resolution: int, halfwidth_sd: Optional[float] = None
) -> GridSpec:
    """Least-squares estimate plus/minus ``halfwidth_sd`` asymptotic standard deviations per axis"""
    halfwidth_sd = settings.GRID_HALFWIDTH_SD if halfwidth_sd is None else halfwidth_sd
    center = least_squares(dataset)
    sigma2 = noise_variance(dataset, center)
    cov = sigma2 * np.linalg.inv(dataset.phi.T @ dataset.phi)
    sd = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    width = np.maximum(halfwidth_sd * sd, 1e-8 * np.maximum(1.0, np.abs(center)))
    bounds = [(float(c - w), float(c + w)) for c, w in zip(center, width)]
    return GridSpec(bounds=bounds, resolution=resolution)


def grid_region(
    state: PerturbationState, grid: GridSpec, chunk: Optional[int] = None
) -> np.ndarray:
    """Indicator at every grid node, as a boolean array of the grid's shape"""
    if grid.d != state.d:
        raise RpsError(f"grid has dimension {grid.d}, parameters have {state.d}")
    return indicator_batch(grid.nodes(), state, chunk=chunk).reshape(grid.shape)


def ellipsoid_mask(e: Ellipsoid, grid: GridSpec) -> np.ndarray:
    return ellipsoid_contains_batch(e, grid.nodes()).reshape(grid.shape)


def region_area(mask: np.ndarray, grid: GridSpec) -> float:
    """Number of true cells times the cell area"""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != grid.shape:
        raise RpsError(f"mask has shape {mask.shape}, grid has shape {grid.shape}")
    return float(np.count_nonzero(mask)) * grid.cell_area


def touches_edge(mask: np.ndarray) -> bool:
    """True if the region reaches the grid border, i.e. its area may be truncated"""
    mask = np.asarray(mask, dtype=bool)
    edges = [np.take(mask, idx, axis=k) for k in range(mask.ndim) for idx in (0, -1)]
    return any(edge.any() for edge in edges)


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(config.model_dump_json().encode("utf-8")).hexdigest()


def active_methods(config: ExperimentConfig) -> list[str]:
    methods = [RPS]
    if Baseline.SPS in config.baselines:
        methods.append(SPS)
    if Baseline.EOA in config.baselines:
        methods.append(RPS_EOA)
        if Baseline.SPS in config.baselines:
            methods.append(SPS_EOA)
    if Baseline.ASYMPTOTIC in config.baselines:
        methods.append(ASYMPTOTIC)
    return methods


@dataclass
class MethodOutcome:
    covered: bool
    rank: Optional[int] = None
    area: Optional[float] = None
    unbounded: bool = False
    truncated: bool = False


@dataclass
class TrialResult:
    n: int
    trial: int
    outcomes: dict = field(default_factory=dict)
    masks: list = field(default_factory=list)
    ellipsoids: list = field(default_factory=list)
    error: Optional[str] = None


def _ellipsoid_record(method: str, n: int, e: Ellipsoid) -> EllipsoidRecord:
    return EllipsoidRecord(
        method=method,
        n=n,
        center=e.center.tolist(),
        shape=e.shape.tolist(),
        radius=e.radius,
        area=ellipse_area(e) if e.d == 2 else None,
    )


def run_trial(
    config: ExperimentConfig,
    n: int,
    trial: int,
    theta: Optional[np.ndarray] = None,
    with_areas: bool = False,
    keep_masks: bool = False,
) -> TrialResult:
    """One realization: dataset, states, and every enabled method judged at theta (default theta*)"""
    seed = random.derive_seed(config.seed, n, trial)
    result = TrialResult(n=n, trial=trial)
    methods = active_methods(config)
    target = np.asarray(config.theta_star if theta is None else theta, dtype=float)

    try:
        dataset = simulate(config, n, seed)
        rps_config = config.rps_config(seed=seed)
        states = {RPS: initialize(rps_config, dataset)}
        if SPS in methods:
            states[SPS] = initialize_sps(rps_config, dataset)

        ellipsoids = {}
        if RPS_EOA in methods:
            ellipsoids[RPS_EOA] = outer_approximation(states[RPS], tol=config.lmi_tol)
        if SPS_EOA in methods:
            ellipsoids[SPS_EOA] = outer_approximation(states[SPS], tol=config.lmi_tol)
        if ASYMPTOTIC in methods:
            ellipsoids[ASYMPTOTIC] = asymptotic_ellipsoid(dataset, config.p)

        for method, state in states.items():
            r = rank(target, state)
            result.outcomes[method] = MethodOutcome(covered=r <= config.m - config.q, rank=r)
        for method, e in ellipsoids.items():
            inside = bool(ellipsoid_contains_batch(e, target[None, :])[0])
            result.outcomes[method] = MethodOutcome(covered=inside, unbounded=not e.bounded)
            if keep_masks:
                result.ellipsoids.append(_ellipsoid_record(method, n, e))

        if with_areas:
            grid = (
                GridSpec(bounds=config.grid_bounds, resolution=config.grid_resolution)
                if config.grid_bounds is not None
                else default_grid(dataset, config.grid_resolution, config.grid_halfwidth_sd)
            )
            for method in methods:
                if method in states:
                    mask = grid_region(states[method], grid)
                else:
                    mask = ellipsoid_mask(ellipsoids[method], grid)
                area = region_area(mask, grid)
                truncated = touches_edge(mask)
                if truncated:
                    logger.debug("%s region of trial %d at n=%d reaches the grid border", method, trial, n)
                result.outcomes[method].area = area
                result.outcomes[method].truncated = truncated
                if keep_masks:
                    result.masks.append(
                        GridMask(
                            method=method,
                            n=n,
                            bounds=grid.bounds,
                            resolution=grid.resolution,
                            area=area,
                            truncated=truncated,
                            cells=mask.astype(int).tolist(),
                        )
                    )
    except RpsError as exc:
        logger.warning("trial %d at n=%d failed: %s", trial, n, exc.detail)
        result.outcomes = {}
        result.masks = []
        result.ellipsoids = []
        result.error = exc.detail
    return result


def _summarise(
    method: str, n: int, results: list[TrialResult], m: int
) -> tuple[MethodSummary, Optional[list[int]], list[float]]:
    outcomes = [r.outcomes[method] for r in results if r.error is None]
    failed = sum(1 for r in results if r.error is not None)
    covered = sum(1 for o in outcomes if o.covered)
    total = len(outcomes)
    coverage = covered / total if total else None
    stderr = math.sqrt(coverage * (1 - coverage) / total) if total else None

    areas = [o.area for o in outcomes if o.area is not None]
    mean_area = area_stderr = None
    if areas:
        mean_area = float(np.mean(areas))
        area_stderr = float(np.std(areas, ddof=1) / math.sqrt(len(areas))) if len(areas) > 1 else 0.0

    ranks = [o.rank for o in outcomes if o.rank is not None]
    counts = np.bincount(ranks, minlength=m + 1)[1:].tolist() if ranks else None

    summary = MethodSummary(
        method=method,
        n=n,
        trials=len(results),
        covered=covered,
        failed=failed,
        coverage=coverage,
        stderr=stderr,
        mean_area=mean_area,
        area_stderr=area_stderr,
        unbounded=sum(1 for o in outcomes if o.unbounded),
        truncated=sum(1 for o in outcomes if o.truncated),
    )
    return summary, counts, [float(a) for a in areas]


def run_study(
    config: ExperimentConfig,
    theta: Optional[np.ndarray] = None,
    with_areas: bool = False,
    keep_masks: bool = False,
    n_jobs: Optional[int] = None,
) -> ExperimentReport:
    """Run ``config.trials`` trials per sample size and aggregate per method.

    With ``keep_masks`` the grid masks and ellipsoids of the first trial
    at each n are stored as the illustrative realization.
    """
    n_jobs = settings.THREADS if n_jobs is None else n_jobs
    started = time.perf_counter()
    methods = active_methods(config)
    report = ExperimentReport(
        name=config.name,
        seed=config.seed,
        config_hash=config_hash(config),
        config=config.model_dump(mode="json"),
    )

    for n in config.n_list:
        logger.info("running %d trials at n=%d (%s)", config.trials, n, ", ".join(methods))
        results = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(run_trial)(
                config,
                n,
                trial,
                theta=theta,
                with_areas=with_areas,
                keep_masks=keep_masks and trial == 0,
            )
            for trial in range(config.trials)
        )
        for method in methods:
            summary, counts, areas = _summarise(method, n, results, config.m)
            report.summaries.append(summary)
            if summary.truncated:
                logger.warning(
                    "%s at n=%d: %d grid regions reach the grid border, their areas are lower bounds",
                    method,
                    n,
                    summary.truncated,
                )
            if counts is not None:
                report.rank_counts[method_key(method, n)] = counts
            if areas:
                report.areas[method_key(method, n)] = areas
        if keep_masks and results and results[0].error is None:
            report.masks.extend(results[0].masks)
            report.ellipsoids.extend(results[0].ellipsoids)

    report.runtime_seconds = time.perf_counter() - started
    return report


def coverage_study(
    config: ExperimentConfig,
    theta: Optional[np.ndarray] = None,
    n_jobs: Optional[int] = None,
) -> ExperimentReport:
    """Empirical coverage of theta* (or inclusion frequency of ``theta``) per method and n"""
    return run_study(config, theta=theta, n_jobs=n_jobs)
