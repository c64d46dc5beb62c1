import re
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, StrictFloat, StrictInt, StrictStr, ValidationError, field_validator
from pydantic_core import PydanticCustomError

from archrecon.errors import BadKeywordShape, BadPattern, SchemaLoadError, UnknownKeyword

JsonType = Literal["object", "array", "string", "number", "integer", "boolean", "null"]
Number = Union[StrictInt, StrictFloat]


class SchemaNode(BaseModel):
    """Closed subset of JSON Schema used for extractor inputs and link targets."""

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    type_: Optional[Union[JsonType, List[JsonType]]] = Field(None, alias="type")
    const: Any = None
    enum: Optional[List[Any]] = None
    pattern: Optional[StrictStr] = None
    properties: Optional[Dict[str, "SchemaNode"]] = None
    required: Optional[List[StrictStr]] = None
    items: Optional["SchemaNode"] = None
    contains: Optional["SchemaNode"] = None
    minimum: Optional[Number] = None
    maximum: Optional[Number] = None

    # annotations only
    schema_uri: Optional[StrictStr] = Field(None, alias="$schema")
    title: Optional[StrictStr] = None
    description: Optional[StrictStr] = None

    _validator: Any = PrivateAttr(default=None)

    @field_validator("pattern")
    @classmethod
    def pattern_must_compile(cls, v: Optional[str]) -> Optional[str]:
        if v is not None:
            try:
                re.compile(v)
            except re.error as e:
                raise PydanticCustomError("bad_pattern", "{reason}", {"reason": str(e)})
        return v

    @property
    def has_const(self) -> bool:
        return "const" in self.model_fields_set

    def to_document(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True, exclude_unset=True)


SchemaNode.model_rebuild()

KEYWORDS = frozenset(
    field.alias or name for name, field in SchemaNode.model_fields.items()
)


def _location(prefix: str, loc) -> str:
    parts = [prefix] if prefix else []
    return "/".join(parts + [str(part) for part in loc])


def _translate(error: ValidationError, prefix: str) -> SchemaLoadError:
    errors = error.errors()
    for err in errors:
        if err["type"] == "extra_forbidden":
            return UnknownKeyword(str(err["loc"][-1]), _location(prefix, err["loc"][:-1]))
    for err in errors:
        if err["type"] == "bad_pattern":
            return BadPattern(str(err["input"]), _location(prefix, err["loc"]), err["msg"])
    err = errors[0]
    keyword = next((str(p) for p in reversed(err["loc"]) if p in KEYWORDS), "<schema>")
    return BadKeywordShape(keyword, _location(prefix, err["loc"]), err["msg"])


def load_schema(doc: Any, location: str = "") -> SchemaNode:
    if not isinstance(doc, dict):
        raise BadKeywordShape("<schema>", location, "schema must be an object")
    try:
        return SchemaNode.model_validate(doc)
    except ValidationError as e:
        raise _translate(e, location)
