"""Scripted reproductions of the two benchmark experiments.

fig1: Laplacian noise (mean 0, variance 1), n = 250; RPS and SPS
indicator regions, both outer approximations and the asymptotic
ellipsoid. fig2: exponential noise with rate 0.5, n in {200, 1000,
2000}; RPS indicator region against the asymptotic ellipsoid.
"""

import logging
from typing import Optional

from rps.core.config import settings
from rps.schemas.experiment import Baseline, CoregressorKind, ExperimentConfig, ShapingKind
from rps.schemas.report import ExperimentReport
from rps.schemas.system import BENCHMARK_FILTER, BENCHMARK_THETA, NoiseFamily
from rps.services.harness import run_study

logger = logging.getLogger(__name__)


def fig1_config(
    seed: int, repetitions: int = 1, resolution: Optional[int] = None
) -> ExperimentConfig:
    return ExperimentConfig(
        name="fig1",
        theta_star=BENCHMARK_THETA,
        input_filter=BENCHMARK_FILTER,
        noise=NoiseFamily.LAPLACE,
        noise_variance=1.0,
        n_list=[250],
        m=10,
        q=1,
        coregressor=CoregressorKind.IDENTITY,
        shaping=ShapingKind.EMPIRICAL_GRAM,
        baselines=[Baseline.SPS, Baseline.EOA, Baseline.ASYMPTOTIC],
        trials=repetitions,
        grid_resolution=resolution or settings.GRID_RESOLUTION,
        grid_halfwidth_sd=settings.GRID_HALFWIDTH_SD,
        seed=seed,
    )


def fig2_config(
    seed: int, repetitions: int = 1, resolution: Optional[int] = None
) -> ExperimentConfig:
    return ExperimentConfig(
        name="fig2",
        theta_star=BENCHMARK_THETA,
        input_filter=BENCHMARK_FILTER,
        noise=NoiseFamily.EXPONENTIAL,
        noise_rate=0.5,
        n_list=[200, 1000, 2000],
        m=10,
        q=1,
        coregressor=CoregressorKind.IDENTITY,
        shaping=ShapingKind.EMPIRICAL_GRAM,
        baselines=[Baseline.ASYMPTOTIC],
        trials=repetitions,
        grid_resolution=resolution or settings.GRID_RESOLUTION,
        grid_halfwidth_sd=settings.GRID_HALFWIDTH_SD,
        seed=seed,
    )


def run_experiment(config: ExperimentConfig, n_jobs: Optional[int] = None) -> ExperimentReport:
    """Areas for every repetition, masks and ellipsoids of the first one"""
    return run_study(config, with_areas=True, keep_masks=True, n_jobs=n_jobs)


def experiment_fig1(
    seed: int,
    repetitions: int = 1,
    resolution: Optional[int] = None,
    n_jobs: Optional[int] = None,
) -> ExperimentReport:
    return run_experiment(fig1_config(seed, repetitions, resolution), n_jobs=n_jobs)


def experiment_fig2(
    seed: int,
    repetitions: int = 1,
    resolution: Optional[int] = None,
    n_jobs: Optional[int] = None,
) -> ExperimentReport:
    return run_experiment(fig2_config(seed, repetitions, resolution), n_jobs=n_jobs)


EXPERIMENTS = {"fig1": fig1_config, "fig2": fig2_config}
