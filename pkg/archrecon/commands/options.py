"""Options and helpers shared by the commands."""
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import click

from archrecon.errors import ConfigurationError
from archrecon.schema.reports import ResolutionReport
from archrecon.schema.run_config import RunConfig, parse_overrides
from archrecon.storage.model_files import load_document

PATH = click.Path(path_type=Path)


def extractor_options(command):
    command = click.option("--extractors", "extractor_dirs", multiple=True, type=PATH,
                           help="Directory of *.extractor.json / *.extractor.yaml definitions. Repeatable.")(command)
    command = click.option("--config", "config_file", type=PATH,
                           help="JSON/YAML file mapping extractor ids to config overrides.")(command)
    command = click.option("--no-builtins", is_flag=True, help="Register only the given definitions.")(command)
    command = click.option("--max-rounds", type=int, help="Divergence guard: orchestration rounds.")(command)
    command = click.option("--max-entities", type=int, help="Divergence guard: entities in one model.")(command)
    return command


async def load_run_config(
    extractor_dirs: Iterable[Path] = (),
    config_file: Optional[Path] = None,
    init_file: Optional[Path] = None,
    no_builtins: bool = False,
    max_rounds: Optional[int] = None,
    max_entities: Optional[int] = None,
    **flags: Any,
) -> RunConfig:
    overrides: Dict[str, Dict[str, Any]] = {}
    if config_file is not None:
        overrides = parse_overrides(await load_document(config_file), str(config_file))
    initial: Dict[str, Any] = {}
    if init_file is not None:
        initial = await load_document(init_file)
        if not isinstance(initial, dict):
            raise ConfigurationError(f"{init_file}: initial model fields must be an object")
    limits = {k: v for k, v in (("max_rounds", max_rounds), ("max_entities", max_entities)) if v is not None}
    return RunConfig.build(
        extractor_dirs=list(extractor_dirs),
        overrides=overrides,
        initial=initial,
        limits=limits,
        builtins=not no_builtins,
        **flags,
    )


def echo_report(report: ResolutionReport) -> None:
    for entry in report:
        marker = "✅" if entry.ok else "⚠️"
        click.echo(f"{marker} {entry.render()}", err=True)
