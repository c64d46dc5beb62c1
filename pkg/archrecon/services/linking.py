"""Retroactive links: `$LINK` entities resolved against the aggregated model."""
import logging
from typing import Any, Dict, Iterator, List, Tuple

from archrecon.errors import MalformedLinkError, PathMalformed, PathNotFound, SchemaLoadError
from archrecon.models.entity import LINK_TYPE, ROOT_KEY, TARGET_KEY, TYPE_KEY, is_link
from archrecon.models.paths import get_path, make_path, split_path
from archrecon.models.value import deep_copy
from archrecon.schema.reports import LinkResolution, ResolutionReport
from archrecon.schema.schema_node import SchemaNode, load_schema
from archrecon.services.schema_match import conforms

logger = logging.getLogger(__name__)

RESOLVED_KEY = "target"


def _preorder(node: Any, segments: List[Any]) -> Iterator[Tuple[List[Any], Any]]:
    yield segments, node
    if isinstance(node, dict):
        for key, child in node.items():
            if key == TARGET_KEY:
                continue
            yield from _preorder(child, segments + [key])
    elif isinstance(node, list):
        for index, child in enumerate(node):
            yield from _preorder(child, segments + [index])


def _target_schema(path: str, link: Dict[str, Any]) -> SchemaNode:
    if ROOT_KEY not in link:
        raise MalformedLinkError(path, f"missing {ROOT_KEY}")
    if TARGET_KEY not in link:
        raise MalformedLinkError(path, f"missing {TARGET_KEY}")
    if not isinstance(link[ROOT_KEY], str):
        raise MalformedLinkError(path, f"{ROOT_KEY} must be a model path string")
    try:
        split_path(link[ROOT_KEY])
    except PathMalformed as e:
        raise MalformedLinkError(path, e.detail)
    try:
        return load_schema(link[TARGET_KEY], TARGET_KEY)
    except SchemaLoadError as e:
        raise MalformedLinkError(path, e.detail)


def collect_links(model: Any) -> List[Tuple[str, Dict[str, Any]]]:
    """Every `$LINK` object in depth-first preorder, validated."""
    links = []
    for segments, node in _preorder(model, []):
        if is_link(node):
            path = make_path(segments)
            _target_schema(path, node)
            links.append((path, node))
    return links


def _candidates(subtree: Any, root_path: str, schema: SchemaNode) -> List[str]:
    found = []

    def visit(node: Any, segments: List[Any]) -> None:
        if isinstance(node, dict):
            if node.get(TYPE_KEY) == LINK_TYPE:
                return
            if conforms(node, schema):
                found.append(make_path(segments))
            for key, child in node.items():
                if key != TARGET_KEY:
                    visit(child, segments + [key])
        elif isinstance(node, list):
            for index, child in enumerate(node):
                visit(child, segments + [index])

    visit(subtree, split_path(root_path))
    return found


def resolve_links(model: Any) -> Tuple[Any, ResolutionReport]:
    resolved_model = deep_copy(model)
    entries: List[LinkResolution] = []
    for path, link in collect_links(resolved_model):
        schema = _target_schema(path, link)
        try:
            subtree = get_path(resolved_model, link[ROOT_KEY])
        except PathNotFound:
            candidates = []
        else:
            candidates = _candidates(subtree, link[ROOT_KEY], schema)

        if len(candidates) == 1:
            link[RESOLVED_KEY] = candidates[0]
            entry = LinkResolution(link=path, outcome="resolved", target=candidates[0], candidates=candidates)
        else:
            link.pop(RESOLVED_KEY, None)
            outcome = "ambiguous" if candidates else "unresolved"
            entry = LinkResolution(link=path, outcome=outcome, candidates=candidates)
        logger.debug(entry.render())
        entries.append(entry)

    report = ResolutionReport(entries)
    logger.info("Resolved %d of %d link(s)", len(report) - len(report.failures), len(report))
    return resolved_model, report
