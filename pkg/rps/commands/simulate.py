import click

from rps.commands.common import (
    config_option,
    emit,
    format_option,
    out_option,
    resolve_config,
    seed_option,
)
from rps.services.harness import simulate
from rps.services.io import dataset_to_csv, dataset_to_json


@click.command("simulate")
@config_option
@seed_option
@click.option("--n", "n", type=click.IntRange(min=1), default=None, help="Sample size (default: first of n_list).")
@out_option
@format_option("csv")
def command(config_path, seed, n, out, fmt):
    """Generate one dataset from the configured system."""
    config = resolve_config(config_path, seed)
    dataset = simulate(config, n or config.n_list[0], config.seed)
    emit(dataset_to_csv(dataset) if fmt == "csv" else dataset_to_json(dataset), out)
