import sys
from typing import Optional, Sequence

import click
from pydantic import ValidationError

from rps.core.config import settings
from rps.core.errors import RpsError
from rps.core.logging import configure_logging

# Import commands
from rps.commands import (
    coverage,
    eoa,
    experiment,
    indicator,
    region_grid,
    simulate,
)


@click.group(name="rps", help=f"{settings.APP_NAME} {settings.VERSION}")
@click.version_option(settings.VERSION, prog_name=settings.APP_NAME)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=settings.LOG_LEVEL,
    show_default=True,
)
def cli(log_level):
    configure_logging(log_level)


# Include commands
cli.add_command(simulate.command)
cli.add_command(indicator.command)
cli.add_command(region_grid.command)
cli.add_command(eoa.command)
cli.add_command(coverage.command)
cli.add_command(experiment.command)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point returning the process exit code: 0 ok, 1 invalid input, 2 numerical failure"""
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        rv = cli.main(args=args, prog_name="rps", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except ValidationError as exc:
        click.echo(f"Error: invalid configuration\n{exc}", err=True)
        return 1
    except RpsError as exc:
        click.echo(f"Error: {exc.detail}", err=True)
        return exc.exit_code
    except OSError as exc:
        click.echo(f"Error: {exc}", err=True)
        return 1
    # --help and --version come back as their exit code
    return rv if isinstance(rv, int) else 0
