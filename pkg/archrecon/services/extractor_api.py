"""File search, reading, regex and parsing helpers handed to extractors.

Every operation is relative to a root directory (the `$path` of the entity an
extractor runs on) and never leaves it.
"""
import json
import os
import re
import xml.etree.ElementTree as ET
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict

try:
    import tomllib
except ImportError:
    import tomli as tomllib

from archrecon.errors import BadPattern, FileMissing, ParseError, PathEscapesRoot, RootMissing
from archrecon.models.value import finite_float, reject_constant, to_field_value

FORMATS = ("json", "yaml", "toml", "xml")

# "/x" and "./x" both name x under the root
LEADING_ROOT = re.compile(r"^(?:\.?/)+")

# Pre-made expressions. `value` captures the interesting payload.
PATTERNS: Dict[str, str] = {
    "URI": r"(?P<value>[a-zA-Z][a-zA-Z0-9+.-]*://[^\s\"'<>()]+)",
    "STRING_LITERAL": r"\"(?P<value>(?:[^\"\\\n]|\\.)*)\"|'(?P<value_single>(?:[^'\\\n]|\\.)*)'",
    "IDENTIFIER": r"(?P<value>[A-Za-z_$][A-Za-z0-9_$]*)",
    "JAVA_ANNOTATION": r"@(?P<value>[A-Z][A-Za-z0-9_]*)",
}


class FileMatch(BaseModel):
    model_config = ConfigDict(frozen=True)

    path: str

    @property
    def dir(self) -> str:
        return os.path.dirname(self.path)

    @property
    def name(self) -> str:
        return os.path.basename(self.path)

    @property
    def stem(self) -> str:
        return os.path.splitext(self.name)[0]

    @property
    def ext(self) -> str:
        return os.path.splitext(self.name)[1].lstrip(".")


class RegexMatch(BaseModel):
    model_config = ConfigDict(frozen=True)

    text: str
    span: Tuple[int, int]
    captures: Dict[str, Optional[str]] = {}

    def value(self) -> Optional[str]:
        """The library patterns' payload, whichever alternative captured it."""
        for name in ("value", "value_single"):
            if self.captures.get(name) is not None:
                return self.captures[name]
        return None


# globs

def expand_braces(pattern: str) -> List[str]:
    """`a/{b,c}/*.{yml,yaml}` -> four plain globs, nested braces allowed."""
    depth = 0
    start = None
    for i, ch in enumerate(pattern):
        if ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}" and depth:
            depth -= 1
            if depth == 0:
                body = pattern[start + 1:i]
                options, level, last = [], 0, 0
                for j, c in enumerate(body):
                    if c == "{":
                        level += 1
                    elif c == "}":
                        level -= 1
                    elif c == "," and level == 0:
                        options.append(body[last:j])
                        last = j + 1
                options.append(body[last:])
                if len(options) == 1:
                    # no alternation; keep the braces literal
                    return [pattern[:i + 1] + rest for rest in expand_braces(pattern[i + 1:])]
                prefix, suffix = pattern[:start], pattern[i + 1:]
                expanded = []
                for option in options:
                    for candidate in expand_braces(prefix + option + suffix):
                        if candidate not in expanded:
                            expanded.append(candidate)
                return expanded
    return [pattern]


@lru_cache(maxsize=256)
def glob_to_regex(pattern: str) -> "re.Pattern[str]":
    i, n = 0, len(pattern)
    out = []
    while i < n:
        ch = pattern[i]
        if ch == "*":
            if pattern[i:i + 2] == "**":
                at_segment_start = i == 0 or pattern[i - 1] == "/"
                if at_segment_start and pattern[i + 2:i + 3] == "/":
                    out.append("(?:.*/)?")
                    i += 3
                    continue
                out.append(".*")
                i += 2
                continue
            out.append("[^/]*")
        elif ch == "?":
            out.append("[^/]")
        elif ch == "[":
            end = pattern.find("]", i + 2 if pattern[i + 1:i + 2] in ("!", "^") else i + 1)
            if end == -1:
                out.append(re.escape(ch))
            else:
                body = pattern[i + 1:end]
                if body[:1] in ("!", "^"):
                    body = "^" + body[1:]
                out.append("[" + body.replace("\\", "\\\\") + "]")
                i = end
        else:
            out.append(re.escape(ch))
        i += 1
    return re.compile("".join(out) + r"\Z")


def get_paths(root: Union[str, Path], glob: str) -> List[FileMatch]:
    root = Path(root)
    if not root.is_dir():
        raise RootMissing(f"root directory does not exist: {root}")
    matchers = [glob_to_regex(LEADING_ROOT.sub("", p)) for p in expand_braces(glob)]
    found = set()
    for dirpath, _dirnames, filenames in os.walk(root, followlinks=False):
        rel_dir = Path(dirpath).relative_to(root).as_posix()
        for filename in filenames:
            rel = filename if rel_dir == "." else f"{rel_dir}/{filename}"
            if not os.path.isfile(os.path.join(dirpath, filename)):
                continue
            if any(m.match(rel) for m in matchers):
                found.add(rel)
    return [FileMatch(path=p) for p in sorted(found)]


# files

def confine(root: Union[str, Path], path: str) -> Path:
    root = Path(root).resolve()
    candidate = (root / path).resolve()
    if candidate != root and root not in candidate.parents:
        raise PathEscapesRoot(f"{path!r} escapes {root}")
    return candidate


def read_text(root: Union[str, Path], path: str) -> str:
    target = confine(root, path)
    if not target.is_file():
        raise FileMissing(f"no such file: {path}")
    return target.read_bytes().decode("utf-8", errors="replace")


# regex

@lru_cache(maxsize=256)
def _compile(pattern: str) -> "re.Pattern[str]":
    try:
        return re.compile(pattern)
    except re.error as e:
        raise BadPattern(pattern, reason=str(e))


def regex_search(text: str, pattern: str) -> List[RegexMatch]:
    compiled = _compile(pattern)
    return [
        RegexMatch(text=m.group(0), span=m.span(), captures=m.groupdict())
        for m in compiled.finditer(text)
    ]


def expand_patterns(pattern: str) -> str:
    """Replace `${patterns.NAME}` with the library expression (groups made anonymous)."""
    def replace(match: "re.Match[str]") -> str:
        name = match.group(1)
        if name not in PATTERNS:
            raise BadPattern(pattern, reason=f"unknown library pattern {name!r}")
        return "(?:" + re.sub(r"\(\?P<[A-Za-z_][A-Za-z0-9_]*>", "(", PATTERNS[name]) + ")"
    return re.sub(r"\$\{patterns\.([A-Z_]+)\}", replace, pattern)


# structured formats

def _xml_to_value(element: ET.Element) -> Any:
    children = list(element)
    text = (element.text or "").strip()
    if not children and not element.attrib:
        return text if text else None
    node: Dict[str, Any] = {}
    if element.attrib:
        node["@attr"] = {_local(k): v for k, v in element.attrib.items()}
    repeated = _repeated(children)
    for child in children:
        tag = _local(child.tag)
        if tag in repeated:
            node.setdefault(tag, []).append(_xml_to_value(child))
        else:
            node[tag] = _xml_to_value(child)
    if text:
        node["#text"] = text
    return node


def _repeated(children: List[ET.Element]) -> set:
    seen, repeated = set(), set()
    for child in children:
        tag = _local(child.tag)
        (repeated if tag in seen else seen).add(tag)
    return repeated


def _local(tag: str) -> str:
    return tag.split("}", 1)[1] if tag.startswith("{") else tag


def parse(text: str, format: str) -> Any:
    if format == "json":
        try:
            return json.loads(text, parse_constant=reject_constant, parse_float=finite_float)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", e.lineno, e.colno)
        except ValueError as e:
            raise ParseError(f"invalid JSON: {e}")
    if format == "yaml":
        try:
            return to_field_value(yaml.safe_load(text))
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            if mark is not None:
                raise ParseError(f"invalid YAML: {getattr(e, 'problem', e)}", mark.line + 1, mark.column + 1)
            raise ParseError(f"invalid YAML: {e}")
    if format == "toml":
        try:
            return to_field_value(tomllib.loads(text))
        except tomllib.TOMLDecodeError as e:
            raise ParseError(f"invalid TOML: {e}", getattr(e, "lineno", None), getattr(e, "colno", None))
    if format == "xml":
        try:
            root = ET.fromstring(text)
        except ET.ParseError as e:
            line, column = e.position
            raise ParseError(f"invalid XML: {e}", line, column + 1)
        return {_local(root.tag): _xml_to_value(root)}
    raise ParseError(f"unsupported format: {format!r}")


class ExtractorAPI:
    """The operations above bound to one root directory and one effective config."""

    def __init__(self, root: Union[str, Path], config: Optional[Dict[str, Any]] = None):
        self.root = Path(root)
        self.config = dict(config or {})

    def get_paths(self, glob: str) -> List[FileMatch]:
        return get_paths(self.root, glob)

    def read_text(self, path: str) -> str:
        return read_text(self.root, path)

    def regex_search(self, text: str, pattern: str) -> List[RegexMatch]:
        return regex_search(text, pattern)

    def parse(self, text: str, format: str) -> Any:
        return parse(text, format)

    def parse_file(self, path: str, format: str) -> Any:
        try:
            return parse(self.read_text(path), format)
        except ParseError as e:
            raise ParseError(f"{path}: {e.message}", e.line, e.column)

    def absolute(self, path: str = "") -> str:
        return str(confine(self.root, path))
