import asyncio
from pathlib import Path
from typing import Optional

import click

from archrecon.commands.options import PATH, echo_report
from archrecon.errors import UnresolvedLinksError
from archrecon.schema.reports import ResolutionReport
from archrecon.services.linking import resolve_links
from archrecon.storage.model_files import load_model, save_model, save_report


async def write_results(model, report: ResolutionReport, out: Path, report_path: Optional[Path]) -> None:
    await save_model(out, model)
    if report_path is not None:
        await save_report(report_path, report.model_dump())


def enforce(report: ResolutionReport, strict: bool) -> None:
    echo_report(report)
    failures = report.failures
    if strict and failures:
        raise UnresolvedLinksError(
            f"{len(failures)} link(s) did not resolve: " + ", ".join(f.link for f in failures)
        )


@click.command("resolve")
@click.argument("model", type=PATH)
@click.option("--out", required=True, type=PATH)
@click.option("--strict", is_flag=True, help="Exit 3 when any link is unresolved or ambiguous.")
@click.option("--report", "report_path", type=PATH, help="Write the resolution report as JSON.")
def resolve(model: Path, out: Path, strict: bool, report_path: Optional[Path]) -> None:
    """Resolve retroactive links in an aggregated model."""
    async def run() -> ResolutionReport:
        resolved, report = resolve_links(await load_model(model))
        await write_results(resolved, report, out, report_path)
        return report

    report = asyncio.run(run())
    enforce(report, strict)
    click.echo(f"✅ Resolved {len(report) - len(report.failures)}/{len(report)} link(s) -> {out}", err=True)
