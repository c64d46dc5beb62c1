"""ModelPath: JSON-Pointer style locations inside a model tree."""
from typing import Any, Iterable, List, Union

from jsonpointer import JsonPointer, JsonPointerException

from archrecon.errors import PathMalformed, PathNotFound

ROOT_PATH = ""

Segment = Union[str, int]


def split_path(path: str) -> List[str]:
    if not isinstance(path, str):
        raise PathMalformed(str(path), "model path must be a string")
    try:
        return JsonPointer(path).parts
    except JsonPointerException as e:
        raise PathMalformed(path, str(e))


def make_path(segments: Iterable[Segment]) -> str:
    return JsonPointer.from_parts([str(s) for s in segments]).path


def child_path(path: str, segment: Segment) -> str:
    return make_path(split_path(path) + [str(segment)])


def _step(node: Any, part: str, path: str) -> Any:
    if isinstance(node, dict):
        if part not in node:
            raise PathNotFound(path, f"no key {part!r}")
        return node[part]
    if isinstance(node, list):
        if not part.isdigit() or (len(part) > 1 and part.startswith("0")):
            raise PathNotFound(path, f"{part!r} is not an array index")
        index = int(part)
        if index >= len(node):
            raise PathNotFound(path, f"index {index} out of range")
        return node[index]
    raise PathNotFound(path, f"cannot descend into a scalar with {part!r}")


def get_path(root: Any, path: str) -> Any:
    node = root
    for part in split_path(path):
        node = _step(node, part, path)
    return node


def set_path(root: Any, path: str, value: Any) -> Any:
    """Replace the node at an existing path; returns the (possibly new) root."""
    parts = split_path(path)
    if not parts:
        return value
    parent = get_path(root, make_path(parts[:-1]))
    last = parts[-1]
    _step(parent, last, path)
    if isinstance(parent, list):
        parent[int(last)] = value
    else:
        parent[last] = value
    return root
