import asyncio
from pathlib import Path
from typing import Any

import click

from archrecon.commands.options import PATH, extractor_options, load_run_config
from archrecon.models.entity import find_entities
from archrecon.services.pipeline import reconstruct_repository, registry_for
from archrecon.storage.model_files import save_model


async def _reconstruct(repo: Path, out: Path, **options: Any) -> int:
    run_config = await load_run_config(**options)
    registry = await registry_for(run_config)
    model = reconstruct_repository(repo, run_config, registry)
    await save_model(out, model, keep_transient=run_config.keep_transient)
    return len(find_entities(model))


@click.command("reconstruct")
@click.option("--repo", required=True, type=PATH, help="Repository checkout to analyse.")
@click.option("--init", "init_file", type=PATH, help="JSON/YAML object merged into the top-level model entity.")
@click.option("--out", required=True, type=PATH, help="Where to write the model.")
@click.option("--keep-transient", is_flag=True, help="Keep $-lowercase fields such as $path in the output.")
@extractor_options
def reconstruct(repo: Path, out: Path, **options: Any) -> None:
    """Reconstruct the architecture model of one repository."""
    entities = asyncio.run(_reconstruct(repo, out, **options))
    click.echo(f"✅ {repo}: {entities} entities -> {out}", err=True)
