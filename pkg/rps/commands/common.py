"""Options and helpers shared by the subcommands"""

import logging
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np

from rps.core.config import settings
from rps.core.errors import ParameterError
from rps.models.dataset import RegressionDataset
from rps.models.state import PerturbationState
from rps.schemas.experiment import ExperimentConfig
from rps.services.experiments import fig1_config
from rps.services.harness import simulate
from rps.services.io import atomic_write, load_config, read_dataset
from rps.services.region import initialize
from rps.services.sps import initialize_sps

logger = logging.getLogger(__name__)

config_option = click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Flat TOML experiment config (defaults to the fig1 setup).",
)
seed_option = click.option(
    "--seed", type=click.IntRange(min=0), default=None, help="Override the config seed."
)
out_option = click.option(
    "--out",
    type=click.Path(path_type=Path),
    default=None,
    help="Output path; stdout when omitted.",
)
threads_option = click.option(
    "--threads",
    type=click.IntRange(min=1),
    default=None,
    help="Size of the work pool (default from RPS_THREADS).",
)
data_option = click.option(
    "--data",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Dataset CSV (t,y,phi_1,...); simulated from the config when omitted.",
)
method_option = click.option(
    "--method",
    type=click.Choice(["rps", "sps"]),
    default="rps",
    show_default=True,
    help="Perturbation scheme.",
)


def format_option(default: str):
    return click.option(
        "--format",
        "fmt",
        type=click.Choice(["json", "csv"]),
        default=default,
        show_default=True,
        help="Output format.",
    )


def resolve_config(config_path: Optional[Path], seed: Optional[int], **overrides) -> ExperimentConfig:
    """Config file (or the fig1 defaults) with command-line overrides applied"""
    base = load_config(config_path) if config_path else fig1_config(settings.DEFAULT_SEED)
    update = {k: v for k, v in overrides.items() if v is not None}
    if seed is not None:
        update["seed"] = seed
    if not update:
        return base
    return ExperimentConfig.model_validate({**base.model_dump(), **update})


def load_dataset(config: ExperimentConfig, data: Optional[Path]) -> RegressionDataset:
    if data is not None:
        return read_dataset(data)
    return simulate(config, config.n_list[0], config.seed)


def make_state(config: ExperimentConfig, dataset: RegressionDataset, method: str) -> PerturbationState:
    rps_config = config.rps_config()
    if method == "sps":
        return initialize_sps(rps_config, dataset)
    return initialize(rps_config, dataset)


def parse_theta(text: str) -> np.ndarray:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ParameterError(f"cannot parse parameter vector {text!r}") from exc
    if not values:
        raise ParameterError("parameter vector is empty")
    return np.array(values)


def emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
        sys.stdout.flush()
    else:
        atomic_write(out, text)
        logger.info("wrote %s", out)
