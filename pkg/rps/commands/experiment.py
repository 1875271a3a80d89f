import logging

import click

from rps.commands.common import emit, format_option, seed_option, threads_option
from rps.core.config import settings
from rps.services.experiments import EXPERIMENTS, run_experiment
from rps.services.io import report_to_json, summary_csv, write_report

logger = logging.getLogger(__name__)


@click.command("experiment")
@click.option("--name", type=click.Choice(sorted(EXPERIMENTS)), required=True, help="Experiment to reproduce.")
@seed_option
@click.option("--trials", type=click.IntRange(min=1), default=1, show_default=True, help="Repetitions (areas are averaged).")
@click.option("--resolution", type=click.IntRange(min=2), default=None, help="Grid cells per axis.")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory (default RPS_OUTPUT_DIR).")
@threads_option
@format_option("csv")
def command(name, seed, trials, resolution, out, threads, fmt):
    """Reproduce a benchmark experiment: report.json, summary.csv, masks and ellipse outlines."""
    seed = settings.DEFAULT_SEED if seed is None else seed
    config = EXPERIMENTS[name](seed, trials, resolution)
    report = run_experiment(config, n_jobs=threads)
    logger.info("%s finished in %.1fs", name, report.runtime_seconds)
    write_report(report, out or settings.OUTPUT_DIR)
    emit(summary_csv(report) if fmt == "csv" else report_to_json(report) + "\n", None)
