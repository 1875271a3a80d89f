import json

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
    parse_theta,
    resolve_config,
    seed_option,
)
from rps.services import region
from rps.services.io import atomic_write, snapshot_to_json


@click.command("indicator")
@click.option("--theta", required=True, help="Parameter to test, comma separated (e.g. 5,1).")
@config_option
@seed_option
@data_option
@method_option
@click.option(
    "--save-state",
    type=click.Path(dir_okay=False),
    default=None,
    help="Write the randomisation snapshot (JSON) for later replay.",
)
@out_option
@format_option("csv")
def command(theta, config_path, seed, data, method, save_state, out, fmt):
    """Decide whether THETA lies in the confidence region; prints indicator and rank."""
    config = resolve_config(config_path, seed)
    dataset = load_dataset(config, data)
    state = make_state(config, dataset, method)
    point = parse_theta(theta)
    r = region.rank(point, state)
    inside = int(r <= state.m - state.q)

    if save_state:
        atomic_write(save_state, snapshot_to_json(region.snapshot(state)))
    if fmt == "json":
        text = json.dumps({"indicator": inside, "rank": r, "m": state.m, "q": state.q}) + "\n"
    else:
        text = f"indicator,rank\n{inside},{r}\n"
    emit(text, out)
