"""Executes declarative extractor definitions against one entity."""
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from archrecon.errors import PathEscapesRoot, TemplateError
from archrecon.models.value import deep_copy, is_scalar, values_equal
from archrecon.schema.extractor_def import (
    EACH_DIRECTIVE,
    PLACEHOLDER,
    WILDCARD,
    DeclarativeExtractorDef,
    EmitCondition,
    EmitRule,
    Segment,
    SourceRule,
    ValuePath,
)
from archrecon.services.aggregation import aggregate
from archrecon.services.extractor_api import ExtractorAPI, FileMatch, confine

logger = logging.getLogger(__name__)

MISSING = object()

Bindings = Dict[str, Any]


# value paths

def _step(node: Any, segment: Segment) -> Any:
    if isinstance(node, dict) and isinstance(segment, str):
        return node.get(segment, MISSING)
    if isinstance(node, list):
        if isinstance(segment, str) and segment.isdigit():
            segment = int(segment)
        if isinstance(segment, int) and not isinstance(segment, bool) and segment < len(node):
            return node[segment]
    return MISSING


def _walk(node: Any, segments: Sequence[Segment]) -> Any:
    for segment in segments:
        node = _step(node, segment)
        if node is MISSING:
            return MISSING
    return node


def select(doc: Any, path: ValuePath) -> Any:
    """First alternative that resolves, or MISSING."""
    for alternative in path.alternatives:
        value = _walk(doc, alternative)
        if value is not MISSING:
            return value
    return MISSING


def fan_out(doc: Any, path: ValuePath) -> Iterator[Tuple[Union[str, int], Any]]:
    segments = path.alternatives[0]
    star = segments.index(WILDCARD)
    container = _walk(doc, segments[:star])
    if isinstance(container, dict):
        children = list(container.items())
    elif isinstance(container, list):
        children = list(enumerate(container))
    else:
        return
    for key, child in children:
        item = _walk(child, segments[star + 1:])
        if item is not MISSING:
            yield key, item


# templates

def _to_text(value: Any) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value)


def _lookup(name: str, bindings: Bindings) -> Any:
    if name not in bindings:
        raise TemplateError(f"unbound placeholder ${{{name}}}")
    value = bindings[name]
    return MISSING if value is None or value is MISSING else deep_copy(value)


def render(template: Any, bindings: Bindings) -> Any:
    if isinstance(template, str):
        whole = PLACEHOLDER.fullmatch(template)
        if whole:
            return _lookup(whole.group(1), bindings)
        pieces, last = [], 0
        for match in PLACEHOLDER.finditer(template):
            value = _lookup(match.group(1), bindings)
            if value is MISSING:
                return MISSING
            if not is_scalar(value):
                raise TemplateError(f"${{{match.group(1)}}} is not a scalar and cannot be embedded in {template!r}")
            pieces.append(template[last:match.start()])
            pieces.append(_to_text(value))
            last = match.end()
        pieces.append(template[last:])
        return "".join(pieces)
    if isinstance(template, list):
        rendered = [render(item, bindings) for item in template]
        return [item for item in rendered if item is not MISSING]
    if isinstance(template, dict):
        if EACH_DIRECTIVE in template:
            return _render_each(template, bindings)
        result = {}
        for key, value in template.items():
            rendered_key = render(key, bindings)
            rendered = render(value, bindings)
            if rendered_key is MISSING or rendered is MISSING or rendered is None:
                continue
            if not isinstance(rendered_key, str):
                rendered_key = _to_text(rendered_key)
            result[rendered_key] = rendered
        return result
    return deep_copy(template)


def _render_each(template: Dict[str, Any], bindings: Bindings) -> Any:
    collection = render(template[EACH_DIRECTIVE], bindings)
    if collection is MISSING:
        return MISSING
    if isinstance(collection, dict):
        elements = list(collection)
    elif isinstance(collection, list):
        elements = collection
    else:
        elements = [collection]
    name = template.get("as", "item")
    rendered = [render(template.get("emit"), {**bindings, name: element}) for element in elements]
    return [item for item in rendered if item is not MISSING]


# sources

def _expand_globs(source: SourceRule, config: Dict[str, Any]) -> List[str]:
    globs: List[str] = []
    for glob in source.globs:
        whole = PLACEHOLDER.fullmatch(glob)
        if whole and isinstance(config.get(whole.group(1)[len("config."):]), list):
            globs.extend(str(g) for g in config[whole.group(1)[len("config."):]])
            continue
        rendered = render(glob, {f"config.{k}": v for k, v in config.items()})
        if rendered is not MISSING:
            globs.append(rendered)
    return globs


def _file_bindings(match: FileMatch) -> Bindings:
    return {
        "file.path": match.path,
        "file.dir": match.dir,
        "file.name": match.name,
        "file.stem": match.stem,
    }


def source_bindings(source: SourceRule, api: ExtractorAPI, base: Bindings) -> Iterator[Bindings]:
    seen = set()
    files: List[FileMatch] = []
    for glob in _expand_globs(source, api.config):
        for match in api.get_paths(glob):
            if match.path not in seen:
                seen.add(match.path)
                files.append(match)
    files.sort(key=lambda m: m.path)

    for match in files:
        bindings = {**base, **_file_bindings(match)}
        if source.parser == "path":
            yield {**bindings, "path": match.path, "dir": match.dir, "name": match.name, "stem": match.stem, "ext": match.ext}
        elif source.parser == "regex":
            pattern = source.compiled_pattern()
            for found in pattern.finditer(api.read_text(match.path)):
                yield {**bindings, **found.groupdict(), "match": found.group(0)}
        else:
            doc = api.parse_file(match.path, source.parser)
            selections = source.select_paths()
            each = source.each_path()
            if each is None:
                yield {**bindings, **_selected(doc, selections)}
                continue
            for key, item in fan_out(doc, each):
                yield {**bindings, "key": key, "item": item, **_selected(item, selections)}


def _selected(node: Any, selections: Dict[str, ValuePath]) -> Bindings:
    chosen = {}
    for name, path in selections.items():
        value = select(node, path)
        chosen[name] = None if value is MISSING else value
    return chosen


# emission

def _condition_holds(condition: EmitCondition, bindings: Bindings, config: Dict[str, Any]) -> bool:
    if condition.config is not None:
        subject = config.get(condition.config)
    else:
        subject = bindings.get(condition.binding)
    if subject is MISSING:
        subject = None
    fields = condition.model_fields_set
    if "present" in fields:
        return (subject is not None) == condition.present
    if "equals" in fields:
        return subject is not None and values_equal(subject, condition.equals)
    if isinstance(subject, list):
        return any(values_equal(item, condition.contains) for item in subject)
    if isinstance(subject, str) and isinstance(condition.contains, str):
        return condition.contains in subject
    return False


def _resolve_paths(value: Any, rule: EmitRule, root: Path, file_dir: str) -> Any:
    if not isinstance(value, dict):
        return value
    for key in rule.resolve_paths:
        raw = value.get(key)
        if not isinstance(raw, str):
            continue
        resolved = os.path.normpath(os.path.join(str(root), file_dir, raw))
        try:
            confine(root, os.path.join(file_dir, raw))
        except PathEscapesRoot:
            logger.debug("Dropping %s=%r: %s is outside %s", key, raw, resolved, root)
            del value[key]
            continue
        if os.path.exists(resolved):
            value[key] = resolved
        else:
            logger.debug("Dropping %s=%r: %s does not exist", key, raw, resolved)
            del value[key]
    return value


def run_declarative(
    definition: DeclarativeExtractorDef,
    entity: Dict[str, Any],
    config: Dict[str, Any],
    root: Union[str, Path],
) -> Dict[str, Any]:
    api = ExtractorAPI(root, config)
    base: Bindings = {f"config.{k}": v for k, v in config.items()}

    if definition.sources:
        per_source: Dict[Optional[str], List[Bindings]] = {}
        everything: List[Bindings] = []
        for index, source in enumerate(definition.sources):
            found = list(source_bindings(source, api, base))
            per_source[source.name or f"#{index}"] = found
            everything.extend(found)
    else:
        per_source, everything = {}, [dict(base)]

    result = deep_copy(entity)
    emitted = 0
    for rule in definition.emit:
        binding_sets = per_source[rule.source] if rule.source is not None else everything
        for bindings in binding_sets:
            if not all(_condition_holds(c, bindings, config) for c in rule.when):
                continue
            value = render(rule.template, bindings)
            if value is MISSING:
                continue
            value = _resolve_paths(value, rule, api.root, bindings.get("file.dir", ""))
            patch = {rule.field: [value] if rule.append else value}
            result = aggregate(result, patch, "model", definition.id)
            emitted += 1
    logger.debug("%s emitted %d value(s)", definition.id, emitted)
    return result
