"""Extractors shipped with archrecon.

Three are declarative definitions under `definitions/`; the rest are Python
functions taking `(entity, context)` and returning the enriched entity.
"""
import logging
import re
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from archrecon.extractors.loader import effective_config
from archrecon.schema.extractor_def import DeclarativeExtractorDef, ExtractorDescriptor, load_def
from archrecon.schema.schema_node import SchemaNode, load_schema
from archrecon.services.extractor_api import PATTERNS, glob_to_regex
from archrecon.services.orchestrator import ExtractorContext
from archrecon.storage.model_files import loads_document

logger = logging.getLogger(__name__)

DEFINITIONS_DIR = Path(__file__).parent / "definitions"

MICROSERVICE_WITH_PATH = {
    "type": "object",
    "properties": {
        "$TYPE": {"const": "microservice"},
        "$path": {"type": "string"},
    },
    "required": ["$TYPE", "$path"],
}

JAVA_MICROSERVICE = {
    "type": "object",
    "properties": {
        "$TYPE": {"const": "microservice"},
        "$path": {"type": "string"},
        "languages": {"type": "array", "contains": {"const": "Java"}},
    },
    "required": ["$TYPE", "$path", "languages"],
}


class NativeExtractor:
    def __init__(
        self,
        id: str,
        input_schema: Dict[str, Any],
        behavior: Callable[[Dict[str, Any], ExtractorContext], Dict[str, Any]],
        config_defaults: Optional[Dict[str, Any]] = None,
        config_schema: Optional[Dict[str, Any]] = None,
    ):
        self.id = id
        self.input_schema = load_schema(input_schema, id)
        self.behavior = behavior
        self.config_defaults = dict(config_defaults or {})
        self.config_schema: Optional[SchemaNode] = load_schema(config_schema, id) if config_schema else None

    def descriptor(self, override: Optional[Dict[str, Any]] = None) -> ExtractorDescriptor:
        return ExtractorDescriptor(
            id=self.id,
            input_schema=self.input_schema,
            config=effective_config(self.id, self.config_defaults, override, self.config_schema),
            behavior=self.behavior,
        )


def _add_unique(entity: Dict[str, Any], field: str, values: List[Any]) -> None:
    existing = entity.setdefault(field, [])
    for value in values:
        if value not in existing:
            existing.append(value)


# language-detect

DEFAULT_EXTENSIONS = {
    "java": "Java",
    "kt": "Kotlin",
    "groovy": "Groovy",
    "scala": "Scala",
    "py": "Python",
    "js": "JavaScript",
    "mjs": "JavaScript",
    "ts": "TypeScript",
    "go": "Go",
    "rs": "Rust",
    "rb": "Ruby",
    "php": "PHP",
    "cs": "C#",
}

DEFAULT_EXCLUDES = ["**/node_modules/**", "**/.git/**", "**/target/**", "**/build/**"]


def detect_languages(entity: Dict[str, Any], context: ExtractorContext) -> Dict[str, Any]:
    extensions = {k.lstrip(".").lower(): v for k, v in context.config["extensions"].items()}
    excludes = [glob_to_regex(g) for g in context.config["exclude"]]
    languages = set()
    for match in context.get_paths("**/*"):
        if any(pattern.match(match.path) for pattern in excludes):
            continue
        language = extensions.get(match.ext.lower())
        if language:
            languages.add(language)
    if languages:
        _add_unique(entity, "languages", sorted(languages))
    return entity


# maven-detect

def _as_list(value: Any) -> List[Any]:
    if value is None:
        return []
    return value if isinstance(value, list) else [value]


def detect_maven(entity: Dict[str, Any], context: ExtractorContext) -> Dict[str, Any]:
    if not context.get_paths("pom.xml"):
        return entity
    pom = context.parse_file("pom.xml", "xml").get("project") or {}
    entity["buildTool"] = "maven"
    dependencies = pom.get("dependencies") if isinstance(pom, dict) else None
    coordinates = []
    for dependency in _as_list(dependencies.get("dependency") if isinstance(dependencies, dict) else None):
        if isinstance(dependency, dict) and dependency.get("groupId") and dependency.get("artifactId"):
            coordinates.append(f"{dependency['groupId']}:{dependency['artifactId']}")
    if coordinates:
        _add_unique(entity, "dependencies", coordinates)
    return entity


# spring-endpoints

MAPPING_PATTERN = r"@(?P<kind>Request|Get|Post|Put|Delete|Patch)Mapping\b(?:\s*\((?P<args>[^)]*)\))?"
REQUEST_METHOD = re.compile(r"RequestMethod\.(?P<method>[A-Z]+)")
CLASS_DECLARATION = re.compile(r"\bclass\s+[A-Za-z_$]")
JAVA_LITERAL = r"\"(?:[^\"\\\n]|\\.)*\"|'(?:[^'\\\n]|\\.)*'"
# comments and literals, so masking keeps every offset in place
JAVA_TOKENS = re.compile(rf"{JAVA_LITERAL}|/\*[\s\S]*?\*/|//[^\n]*")
# a leading positional argument or the value/path attribute, single literal or array
MAPPING_PATHS = re.compile(
    rf"^\s*(?P<positional>\{{[^}}]*\}}|{JAVA_LITERAL})"
    rf"|\b(?:value|path)\s*=\s*(?P<named>\{{[^}}]*\}}|{JAVA_LITERAL})"
)


def _mask(text: str, literals: bool) -> str:
    def blank(found: "re.Match[str]") -> str:
        token = found.group(0)
        if token[0] in "\"'":
            return token[0] + " " * (len(token) - 2) + token[0] if literals else token
        return " " * len(token)

    return JAVA_TOKENS.sub(blank, text)


def _join(prefix: str, path: str) -> str:
    if not prefix:
        return path or "/"
    if not path:
        return prefix
    return prefix.rstrip("/") + "/" + path.lstrip("/")


def _mapping(found, context: ExtractorContext) -> Tuple[str, List[str]]:
    args = found.captures.get("args") or ""
    target = MAPPING_PATHS.search(args)
    literals = []
    if target:
        literals = context.regex_search(target.group("positional") or target.group("named"), PATTERNS["STRING_LITERAL"])
    paths = [literal.value() for literal in literals] or [""]
    kind = found.captures["kind"]
    if kind == "Request":
        method = REQUEST_METHOD.search(args)
        return (method.group("method") if method else "ANY"), paths
    return kind.upper(), paths


def spring_endpoints(entity: Dict[str, Any], context: ExtractorContext) -> Dict[str, Any]:
    endpoints = []
    for match in context.get_paths(context.config["glob"]):
        code = _mask(context.read_text(match.path), literals=False)
        declaration = CLASS_DECLARATION.search(_mask(code, literals=True))
        class_start = declaration.start() if declaration else -1
        prefixes = [""]
        for found in context.regex_search(code, MAPPING_PATTERN):
            method, paths = _mapping(found, context)
            if found.span[0] < class_start and found.captures["kind"] == "Request":
                # type-level mapping prefixes every method below it
                prefixes = paths
                continue
            for prefix in prefixes:
                for path in paths:
                    endpoint = {"method": method, "path": _join(prefix, path)}
                    if endpoint not in endpoints:
                        endpoints.append(endpoint)
    if endpoints:
        _add_unique(entity, "endpoints", endpoints)
    return entity


NATIVE_EXTRACTORS = {
    "language-detect": lambda: NativeExtractor(
        "language-detect",
        MICROSERVICE_WITH_PATH,
        detect_languages,
        config_defaults={"extensions": DEFAULT_EXTENSIONS, "exclude": DEFAULT_EXCLUDES},
        config_schema={
            "type": "object",
            "properties": {
                "extensions": {"type": "object"},
                "exclude": {"type": "array", "items": {"type": "string"}},
            },
        },
    ),
    "maven-detect": lambda: NativeExtractor("maven-detect", MICROSERVICE_WITH_PATH, detect_maven),
    "spring-endpoints": lambda: NativeExtractor(
        "spring-endpoints",
        JAVA_MICROSERVICE,
        spring_endpoints,
        config_defaults={"glob": "**/*.java"},
        config_schema={"type": "object", "properties": {"glob": {"type": "string"}}},
    ),
}

# registration order
BUILTIN_ORDER = (
    "docker-compose-services",
    "language-detect",
    "maven-detect",
    "nodejs-detect",
    "spring-endpoints",
    "spring-eureka",
)


@lru_cache(maxsize=None)
def builtin_definition(extractor_id: str) -> DeclarativeExtractorDef:
    path = DEFINITIONS_DIR / f"{extractor_id}.extractor.yaml"
    return load_def(loads_document(path.read_text(encoding="utf-8"), str(path)), str(path))


def builtin_extractors() -> List[Tuple[str, Any]]:
    entries = []
    for extractor_id in BUILTIN_ORDER:
        if extractor_id in NATIVE_EXTRACTORS:
            entries.append(("native", NATIVE_EXTRACTORS[extractor_id]()))
        else:
            entries.append(("declarative", builtin_definition(extractor_id)))
    return entries
