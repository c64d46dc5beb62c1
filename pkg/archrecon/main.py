import logging

import click

from archrecon import __version__, config
from archrecon.commands import aggregate, pipeline, reconstruct, resolve
from archrecon.errors import EXIT_CONFIGURATION, AggregationConflict, ReconstructionError

logger = logging.getLogger(__name__)


def report_failure(error: ReconstructionError) -> None:
    if isinstance(error, AggregationConflict):
        for conflict in error.conflicts:
            click.echo(conflict.render(), err=True)
        click.echo(f"❌ {len(error.conflicts)} conflict(s)", err=True)
    else:
        click.echo(f"❌ {error.detail}", err=True)


class ArchreconGroup(click.Group):
    """Turns domain errors into exit codes; usage errors count as configuration errors."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_CONFIGURATION
            raise
        except ReconstructionError as e:
            logger.debug("Command failed", exc_info=True)
            report_failure(e)
            ctx.exit(e.exit_code)


@click.group(cls=ArchreconGroup)
@click.version_option(__version__, prog_name="archrecon")
@click.option("--log-level", default=config.LOG_LEVEL, show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.option("-v", "--verbose", is_flag=True, help="Same as --log-level DEBUG.")
def cli(log_level: str, verbose: bool) -> None:
    """Static architecture reconstruction for microservice repositories."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


# Register commands
cli.add_command(reconstruct.reconstruct)
cli.add_command(aggregate.aggregate)
cli.add_command(resolve.resolve)
cli.add_command(pipeline.pipeline)
