import re
from typing import Any, Callable, Dict, List, Literal, Optional, Set, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from archrecon.errors import BadPattern, DefinitionError
from archrecon.schema.schema_node import SchemaNode

Parser = Literal["json", "yaml", "toml", "xml", "regex", "path"]
STRUCTURED_PARSERS = ("json", "yaml", "toml", "xml")

PLACEHOLDER = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_.\-]*)\}")
FILE_BINDINGS = frozenset({"file.path", "file.dir", "file.name", "file.stem"})
PATH_BINDINGS = frozenset({"path", "dir", "name", "stem", "ext"})
EACH_BINDINGS = frozenset({"key", "item"})
EACH_DIRECTIVE = "$each"


class Wildcard:
    def __repr__(self) -> str:
        return "*"


WILDCARD = Wildcard()
Segment = Union[str, int, Wildcard]

_SEGMENT = re.compile(r"([^.\[\]]+)|\[(\d+|\*)\]")


class ValuePath(BaseModel):
    """`services.*`, `build.context|build`, `modules[0].name`."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    expression: str
    alternatives: Tuple[Tuple[Segment, ...], ...]

    @property
    def has_wildcard(self) -> bool:
        return any(WILDCARD in alt for alt in self.alternatives)


def parse_value_path(expression: str) -> ValuePath:
    if not isinstance(expression, str) or not expression.strip():
        raise ValueError("value path must be a non-empty string")
    alternatives = []
    for raw in expression.split("|"):
        raw = raw.strip()
        segments: List[Segment] = []
        pos = 0
        while pos < len(raw):
            if raw[pos] == "." and segments:
                pos += 1
            match = _SEGMENT.match(raw, pos)
            if match is None:
                raise ValueError(f"bad value path {expression!r} at offset {pos}")
            name, bracket = match.groups()
            if name is not None:
                segments.append(WILDCARD if name == "*" else name)
            else:
                segments.append(WILDCARD if bracket == "*" else int(bracket))
            pos = match.end()
        if not segments:
            raise ValueError(f"empty alternative in value path {expression!r}")
        if segments.count(WILDCARD) > 1:
            raise ValueError(f"wildcard may appear at most once: {expression!r}")
        alternatives.append(tuple(segments))
    if len(alternatives) > 1 and any(WILDCARD in alt for alt in alternatives):
        raise ValueError(f"wildcard paths cannot have alternatives: {expression!r}")
    return ValuePath(expression=expression, alternatives=tuple(alternatives))


def placeholders(value: Any) -> Set[str]:
    """Binding names referenced anywhere in a template, minus names `$each` introduces."""
    if isinstance(value, str):
        return set(PLACEHOLDER.findall(value))
    if isinstance(value, list):
        return set().union(*(placeholders(v) for v in value)) if value else set()
    if isinstance(value, dict):
        if EACH_DIRECTIVE in value:
            inner = placeholders(value.get("emit")) - {value.get("as", "item")}
            return placeholders(value[EACH_DIRECTIVE]) | inner
        return set().union(*(placeholders(k) | placeholders(v) for k, v in value.items())) if value else set()
    return set()


class SourceRule(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: Optional[str] = None
    glob: Union[str, List[str]]
    parser: Parser
    pattern: Optional[str] = None
    each: Optional[str] = None
    select: Dict[str, str] = {}

    @field_validator("each")
    @classmethod
    def each_fans_out(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and not parse_value_path(v).has_wildcard:
            raise ValueError("`each` needs exactly one `*` wildcard")
        return v

    @field_validator("select")
    @classmethod
    def select_paths_are_plain(cls, v: Dict[str, str]) -> Dict[str, str]:
        for name, expression in v.items():
            if parse_value_path(expression).has_wildcard:
                raise ValueError(f"select {name!r}: wildcards belong in `each`")
        return v

    @model_validator(mode="after")
    def parser_options(self) -> "SourceRule":
        if self.parser == "regex":
            if not self.pattern:
                raise ValueError("regex sources need a `pattern`")
            if self.each or self.select:
                raise ValueError("regex sources bind named captures, not `each`/`select`")
            try:
                self.compiled_pattern()
            except (re.error, BadPattern) as e:
                raise ValueError(f"bad pattern: {e}")
        elif self.pattern is not None:
            raise ValueError(f"`pattern` only applies to regex sources, not {self.parser!r}")
        if self.parser == "path" and (self.each or self.select):
            raise ValueError("path sources bind file path components only")
        return self

    @property
    def globs(self) -> List[str]:
        return [self.glob] if isinstance(self.glob, str) else list(self.glob)

    def each_path(self) -> Optional[ValuePath]:
        return parse_value_path(self.each) if self.each else None

    def select_paths(self) -> Dict[str, ValuePath]:
        return {name: parse_value_path(expr) for name, expr in self.select.items()}

    def compiled_pattern(self) -> "re.Pattern[str]":
        from archrecon.services.extractor_api import expand_patterns

        return re.compile(expand_patterns(self.pattern))

    def produces(self) -> Set[str]:
        names = set(FILE_BINDINGS)
        if self.parser == "regex":
            names |= set(self.compiled_pattern().groupindex) | {"match"}
        elif self.parser == "path":
            names |= PATH_BINDINGS
        else:
            names |= set(self.select)
            if self.each:
                names |= EACH_BINDINGS
        return names


class EmitCondition(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    config: Optional[str] = None
    binding: Optional[str] = None
    contains: Any = None
    equals: Any = None
    present: Optional[bool] = None

    @model_validator(mode="after")
    def one_subject_one_test(self) -> "EmitCondition":
        if (self.config is None) == (self.binding is None):
            raise ValueError("a condition names exactly one of `config` or `binding`")
        tests = {"contains", "equals", "present"} & self.model_fields_set
        if len(tests) != 1:
            raise ValueError("a condition uses exactly one of `contains`, `equals`, `present`")
        return self


class EmitRule(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    target: str = Field(..., pattern=r"^[^\[\]]+(\[\])?$")
    template: Any
    source: Optional[str] = None
    when: List[EmitCondition] = []
    resolve_paths: List[str] = ["$path"]

    @property
    def field(self) -> str:
        return self.target[:-2] if self.append else self.target

    @property
    def append(self) -> bool:
        return self.target.endswith("[]")

    def references(self) -> Set[str]:
        names = placeholders(self.template)
        names |= {c.binding for c in self.when if c.binding is not None}
        return names


class DeclarativeExtractorDef(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    id: str = Field(..., min_length=1)
    description: Optional[str] = None
    match: SchemaNode
    config_defaults: Dict[str, Any] = {}
    config_schema: Optional[SchemaNode] = None
    sources: List[SourceRule] = []
    emit: List[EmitRule] = Field(..., min_length=1)

    @model_validator(mode="after")
    def bindings_are_closed(self) -> "DeclarativeExtractorDef":
        named = {s.name: s for s in self.sources if s.name}
        if len(named) != len([s for s in self.sources if s.name]):
            raise ValueError("source names must be unique")
        config_keys = set(self.config_defaults)
        if self.config_schema is not None and self.config_schema.properties:
            config_keys |= set(self.config_schema.properties)
        for source in self.sources:
            for name in sorted(set().union(*(placeholders(g) for g in source.globs))):
                if not name.startswith("config.") or name[len("config."):] not in config_keys:
                    raise ValueError(f"glob placeholder ${{{name}}} must name a declared config key")
        for index, rule in enumerate(self.emit):
            if rule.source is not None:
                if rule.source not in named:
                    raise ValueError(f"emit[{index}] names unknown source {rule.source!r}")
                available = named[rule.source].produces()
            elif self.sources:
                available = set().union(*(s.produces() for s in self.sources))
            else:
                available = set()
            for name in sorted(rule.references()):
                if name.startswith("config."):
                    if name[len("config."):] not in config_keys:
                        raise ValueError(f"emit[{index}] references undeclared config {name!r}")
                elif name not in available:
                    raise ValueError(f"emit[{index}] references unbound placeholder ${{{name}}}")
            for condition in rule.when:
                if condition.config is not None and condition.config not in config_keys:
                    raise ValueError(f"emit[{index}] condition on undeclared config {condition.config!r}")
        return self


def load_def(doc: Any, origin: str = "") -> DeclarativeExtractorDef:
    label = f" ({origin})" if origin else ""
    if not isinstance(doc, dict):
        raise DefinitionError(f"extractor definition must be an object{label}")
    try:
        return DeclarativeExtractorDef.model_validate(doc)
    except ValidationError as e:
        err = e.errors()[0]
        where = ".".join(str(p) for p in err["loc"]) or "<definition>"
        if err["type"] == "literal_error" and err["loc"] and err["loc"][-1] == "parser":
            raise DefinitionError(f"unknown parser {err['input']!r} at {where}{label}")
        if err["type"] == "missing":
            raise DefinitionError(f"missing field {where}{label}")
        raise DefinitionError(f"{where}: {err['msg']}{label}")
    except (re.error, BadPattern) as e:
        raise DefinitionError(f"bad pattern: {e}{label}")


class ExtractorDescriptor(BaseModel):
    """What the orchestrator dispatches; native functions and declarative defs alike."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    id: str = Field(..., min_length=1)
    input_schema: SchemaNode
    config: Dict[str, Any] = {}
    behavior: Callable[..., Any]
    definition: Optional[DeclarativeExtractorDef] = None

    @property
    def kind(self) -> str:
        return "declarative" if self.definition is not None else "native"
