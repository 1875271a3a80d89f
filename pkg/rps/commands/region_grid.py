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
)
from rps.schemas.experiment import GridSpec
from rps.schemas.report import GridMask
from rps.services.harness import default_grid, grid_region, region_area, touches_edge
from rps.services.io import mask_to_csv


@click.command("region-grid")
@config_option
@seed_option
@data_option
@method_option
@click.option("--resolution", type=click.IntRange(min=2), default=None, help="Grid cells per axis.")
@out_option
@format_option("csv")
def command(config_path, seed, data, method, resolution, out, fmt):
    """Evaluate the indicator on a grid and write the mask."""
    config = resolve_config(config_path, seed, grid_resolution=resolution)
    dataset = load_dataset(config, data)
    state = make_state(config, dataset, method)
    grid = (
        GridSpec(bounds=config.grid_bounds, resolution=config.grid_resolution)
        if config.grid_bounds is not None
        else default_grid(dataset, config.grid_resolution, config.grid_halfwidth_sd)
    )
    mask = grid_region(state, grid)
    if touches_edge(mask):
        click.echo("Warning: the region reaches the grid border; widen the grid bounds", err=True)
    if fmt == "csv":
        emit(mask_to_csv(mask), out)
        return
    record = GridMask(
        method=method,
        n=dataset.n,
        bounds=grid.bounds,
        resolution=grid.resolution,
        area=region_area(mask, grid),
        truncated=touches_edge(mask),
        cells=mask.astype(int).tolist(),
    )
    emit(record.model_dump_json(indent=2) + "\n", out)
