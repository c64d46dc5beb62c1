import asyncio
from pathlib import Path
from typing import Any, Dict, Tuple

import click

from archrecon.commands.options import PATH
from archrecon.models.entity import strip_transient
from archrecon.services.aggregation import aggregate_many
from archrecon.storage.model_files import load_model, save_model


async def aggregate_files(models: Tuple[Path, ...], collect: bool = False) -> Dict[str, Any]:
    trees = await asyncio.gather(*(load_model(path) for path in models))
    return aggregate_many([(str(path), strip_transient(tree)) for path, tree in zip(models, trees)], collect=collect)


@click.command("aggregate")
@click.argument("models", nargs=-1, required=True, type=PATH)
@click.option("--out", required=True, type=PATH)
@click.option("--on-conflict", type=click.Choice(["fail", "collect"]), default="fail", show_default=True,
              help="fail stops at the first conflict; collect reports all of them and writes nothing.")
def aggregate(models: Tuple[Path, ...], out: Path, on_conflict: str) -> None:
    """Merge model files, left to right, into one system model."""
    async def run() -> None:
        merged = await aggregate_files(models, collect=on_conflict == "collect")
        await save_model(out, merged)

    asyncio.run(run())
    click.echo(f"✅ Aggregated {len(models)} model(s) -> {out}", err=True)
