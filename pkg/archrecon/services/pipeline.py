"""Per-repository reconstruction and the reconstruct -> aggregate -> resolve pipeline."""
import asyncio
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from archrecon import config
from archrecon.errors import ConfigurationError
from archrecon.extractors.loader import build_registry, load_definitions
from archrecon.models.entity import new_model, strip_transient
from archrecon.schema.reports import ResolutionReport
from archrecon.schema.run_config import RunConfig
from archrecon.services.aggregation import aggregate, aggregate_many
from archrecon.services.linking import resolve_links
from archrecon.services.orchestrator import ExtractorRegistry, Orchestrator

logger = logging.getLogger(__name__)


async def registry_for(run_config: RunConfig) -> ExtractorRegistry:
    definitions = await load_definitions(run_config.extractor_dirs)
    return build_registry(definitions, run_config.overrides, builtins=run_config.builtins)


def initial_model(repo: Path, run_config: RunConfig) -> Dict[str, Any]:
    model = new_model(str(repo.resolve()))
    if run_config.initial:
        model = aggregate(model, run_config.initial, "model", "init")
    return model


def reconstruct_repository(repo: Path, run_config: RunConfig, registry: ExtractorRegistry) -> Dict[str, Any]:
    """The model of one repository, transient fields still in place."""
    repo = Path(repo)
    if not repo.is_dir():
        raise ConfigurationError(f"repository is not a directory: {repo}")
    logger.info("Reconstructing %s with %d extractor(s)", repo, len(registry))
    return Orchestrator(registry, run_config.limits, repo).run(initial_model(repo, run_config))


async def reconstruct_all(
    repos: Sequence[Path],
    run_config: RunConfig,
    registry: ExtractorRegistry,
    workers: Optional[int] = None,
) -> List[Dict[str, Any]]:
    semaphore = asyncio.Semaphore(workers or config.PIPELINE_WORKERS)

    async def one(repo: Path) -> Dict[str, Any]:
        async with semaphore:
            return await asyncio.to_thread(reconstruct_repository, repo, run_config, registry)

    results = await asyncio.gather(*(one(repo) for repo in repos), return_exceptions=True)
    # first failure in argument order wins
    for result in results:
        if isinstance(result, BaseException):
            raise result
    return list(results)


async def run_pipeline(repos: Sequence[Path], run_config: RunConfig) -> Tuple[Dict[str, Any], ResolutionReport]:
    if not repos:
        raise ConfigurationError("pipeline needs at least one repository")
    registry = await registry_for(run_config)
    models = await reconstruct_all(repos, run_config, registry)
    merged = aggregate_many([(str(repo), strip_transient(model)) for repo, model in zip(repos, models)])
    return resolve_links(merged)
