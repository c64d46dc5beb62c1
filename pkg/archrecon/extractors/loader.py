"""Turns extractor definition files and built-ins into a registry."""
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

from archrecon.config import EXTRACTOR_FILE_SUFFIXES
from archrecon.errors import ConfigurationError, DefinitionError, ModelFileError
from archrecon.schema.extractor_def import DeclarativeExtractorDef, ExtractorDescriptor, load_def
from archrecon.schema.schema_node import SchemaNode
from archrecon.services.declarative import run_declarative
from archrecon.services.orchestrator import ExtractorContext, ExtractorRegistry
from archrecon.services.schema_match import conforms
from archrecon.storage.model_files import load_document

logger = logging.getLogger(__name__)


def definition_files(directory: Path) -> List[Path]:
    return sorted(
        (p for p in Path(directory).iterdir() if p.is_file() and p.name.endswith(EXTRACTOR_FILE_SUFFIXES)),
        key=lambda p: p.name,
    )


async def load_definition_file(path: Path) -> DeclarativeExtractorDef:
    try:
        doc = await load_document(path)
    except ModelFileError as e:
        raise DefinitionError(e.detail)
    return load_def(doc, str(path))


async def load_definitions(directories: Iterable[Path]) -> List[DeclarativeExtractorDef]:
    """Every definition file of every directory; directories in order, files by name."""
    definitions = []
    for directory in directories:
        for path in definition_files(directory):
            definitions.append(await load_definition_file(path))
            logger.debug("Loaded extractor definition %s", path)
    return definitions


def effective_config(
    extractor_id: str,
    defaults: Dict[str, Any],
    override: Optional[Dict[str, Any]],
    schema: Optional[SchemaNode],
) -> Dict[str, Any]:
    config = dict(defaults)
    config.update(override or {})
    if schema is not None and not conforms(config, schema):
        raise ConfigurationError(f"config for {extractor_id!r} does not match its config schema: {config}")
    return config


def declarative_descriptor(definition: DeclarativeExtractorDef, override: Optional[Dict[str, Any]] = None) -> ExtractorDescriptor:
    config = effective_config(definition.id, definition.config_defaults, override, definition.config_schema)

    def behavior(entity: Dict[str, Any], context: ExtractorContext) -> Dict[str, Any]:
        return run_declarative(definition, entity, context.config, context.root)

    return ExtractorDescriptor(
        id=definition.id,
        input_schema=definition.match,
        config=config,
        behavior=behavior,
        definition=definition,
    )


def build_registry(
    definitions: Iterable[DeclarativeExtractorDef],
    overrides: Optional[Dict[str, Dict[str, Any]]] = None,
    builtins: bool = True,
) -> ExtractorRegistry:
    """Built-ins first (unless disabled), then user definitions in load order."""
    from archrecon.extractors.builtin import builtin_extractors

    overrides = dict(overrides or {})
    entries: List[Tuple[str, Any]] = []
    if builtins:
        entries.extend(builtin_extractors())
    entries.extend(("declarative", d) for d in definitions)

    registry = ExtractorRegistry()
    for kind, entry in entries:
        override = overrides.get(entry.id)
        if kind == "declarative":
            registry.register(declarative_descriptor(entry, override))
        else:
            registry.register(entry.descriptor(override))

    unknown = sorted(set(overrides) - set(registry.ids()))
    if unknown:
        raise ConfigurationError(f"config names unknown extractor id(s): {', '.join(unknown)}")
    logger.info("Registered %d extractor(s): %s", len(registry), ", ".join(registry.ids()))
    return registry
