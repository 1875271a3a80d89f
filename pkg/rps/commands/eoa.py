import click

from rps.commands.common import (
    make_state,
    config_option,
    data_option,
    emit,
    format_option,
    load_dataset,
    method_option,
    out_option,
    resolve_config,
    seed_option,
    threads_option,
)
from rps.core.config import settings
from rps.services.eoa import outer_approximation
from rps.services.io import ellipse_to_csv, ellipsoid_to_json


@click.command("eoa")
@config_option
@seed_option
@data_option
@method_option
@click.option("--points", type=click.IntRange(min=3), default=200, show_default=True, help="Boundary points for CSV output.")
@threads_option
@out_option
@format_option("json")
def command(config_path, seed, data, method, points, threads, out, fmt):
    """Ellipsoidal outer-approximation of the region (JSON, or boundary points as CSV)."""
    config = resolve_config(config_path, seed)
    dataset = load_dataset(config, data)
    state = make_state(config, dataset, method)
    e = outer_approximation(state, tol=config.lmi_tol, n_jobs=threads or settings.THREADS)
    emit(ellipse_to_csv(e, points) if fmt == "csv" else ellipsoid_to_json(e) + "\n", out)
