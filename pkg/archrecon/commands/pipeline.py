import asyncio
from pathlib import Path
from typing import Any, Optional, Tuple

import click

from archrecon.commands.options import PATH, extractor_options, load_run_config
from archrecon.commands.resolve import enforce, write_results
from archrecon.schema.reports import ResolutionReport
from archrecon.services.pipeline import run_pipeline


@click.command("pipeline")
@click.option("--repo", "repos", multiple=True, required=True, type=PATH, help="Repository checkout. Repeatable.")
@click.option("--init", "init_file", type=PATH, help="JSON/YAML object merged into every top-level model entity.")
@click.option("--out", required=True, type=PATH)
@click.option("--strict", is_flag=True, help="Exit 3 when any link is unresolved or ambiguous.")
@click.option("--report", "report_path", type=PATH, help="Write the resolution report as JSON.")
@extractor_options
def pipeline(repos: Tuple[Path, ...], out: Path, strict: bool, report_path: Optional[Path], **options: Any) -> None:
    """Reconstruct every repository, aggregate the models and resolve links."""
    async def run() -> ResolutionReport:
        run_config = await load_run_config(strict=strict, **options)
        model, report = await run_pipeline(list(repos), run_config)
        await write_results(model, report, out, report_path)
        return report

    report = asyncio.run(run())
    enforce(report, strict)
    click.echo(f"✅ {len(repos)} repositories, {len(report)} link(s) -> {out}", err=True)
