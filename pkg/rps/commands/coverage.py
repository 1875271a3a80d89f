import click

from rps.commands.common import (
    config_option,
    emit,
    format_option,
    out_option,
    parse_theta,
    resolve_config,
    seed_option,
    threads_option,
)
from rps.services.harness import coverage_study
from rps.services.io import report_to_json, summary_csv


@click.command("coverage")
@config_option
@seed_option
@click.option("--trials", type=click.IntRange(min=1), default=None, help="Monte Carlo trials per sample size.")
@click.option("--theta", default=None, help="Parameter to test instead of the true one (comma separated).")
@threads_option
@out_option
@format_option("csv")
def command(config_path, seed, trials, theta, threads, out, fmt):
    """Monte Carlo coverage study; one CSV row per method and sample size."""
    config = resolve_config(config_path, seed, trials=trials)
    target = parse_theta(theta) if theta else None
    report = coverage_study(config, theta=target, n_jobs=threads)
    emit(summary_csv(report) if fmt == "csv" else report_to_json(report) + "\n", out)
