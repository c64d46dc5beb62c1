import itertools
import re
from typing import Any, Dict, Iterator, List, Tuple

from archrecon.models.paths import make_path
from archrecon.models.value import deep_copy

TYPE_KEY = "$TYPE"
ROOT_KEY = "$ROOT"
TARGET_KEY = "$TARGET"
PATH_KEY = "$path"
UID_KEY = "$uid"

MODEL_TYPE = "$MODEL"
LINK_TYPE = "$LINK"
MICROSERVICE_TYPE = "microservice"

# Reserved keys stripped from every export. Uppercase framework keys never match.
TRANSIENT_KEY_PATTERN = re.compile(r"\$[a-z0-9_]+")

ModelEntity = Dict[str, Any]


def is_transient_key(key: str) -> bool:
    return TRANSIENT_KEY_PATTERN.fullmatch(key) is not None


def entity_type(node: Any):
    if isinstance(node, dict):
        tag = node.get(TYPE_KEY)
        if isinstance(tag, str) and tag:
            return tag
    return None


def is_entity(node: Any) -> bool:
    return entity_type(node) is not None


def is_link(node: Any) -> bool:
    return entity_type(node) == LINK_TYPE


def strip_transient(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: strip_transient(v) for k, v in value.items() if not is_transient_key(k)}
    if isinstance(value, list):
        return [strip_transient(v) for v in value]
    return value


def _walk(node: Any, segments: List[Any]) -> Iterator[Tuple[List[Any], Any]]:
    yield segments, node
    if isinstance(node, dict):
        for key, child in node.items():
            if key == TARGET_KEY:
                continue
            yield from _walk(child, segments + [key])
    elif isinstance(node, list):
        for index, child in enumerate(node):
            yield from _walk(child, segments + [index])


def find_entities(root: Any) -> List[Tuple[str, ModelEntity]]:
    """Preorder list of typed objects; links and `$TARGET` schemas are not entities."""
    return [
        (make_path(segments), node)
        for segments, node in _walk(root, [])
        if is_entity(node) and not is_link(node)
    ]


def new_model(repository_path: str, **fields: Any) -> ModelEntity:
    model = {TYPE_KEY: MODEL_TYPE, PATH_KEY: repository_path}
    model.update(deep_copy(fields))
    return model


class UidAllocator:
    """Hands out `$uid` markers, unique for one orchestration run."""

    def __init__(self):
        self._counter = itertools.count(1)

    def assign(self, root: Any) -> int:
        return assign_uids(root, self._counter)


def assign_uids(root: Any, counter: Iterator[int]) -> int:
    """Give every entity lacking `$uid` the next value from `counter`."""
    assigned = 0
    for _, entity in find_entities(root):
        if UID_KEY not in entity:
            entity[UID_KEY] = next(counter)
            assigned += 1
    return assigned
