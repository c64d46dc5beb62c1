"""Field values of the architecture model: plain JSON-compatible Python trees.

null -> None, boolean -> bool, number -> int/float, string -> str,
object -> dict (str keys, insertion order kept), array -> list.
"""
import datetime
import math
from typing import Any, Dict, List, Union

FieldValue = Union[None, bool, int, float, str, Dict[str, Any], List[Any]]

NULL = "null"
BOOLEAN = "boolean"
NUMBER = "number"
STRING = "string"
OBJECT = "object"
ARRAY = "array"

SCALAR_KINDS = (NULL, BOOLEAN, NUMBER, STRING)


def kind_of(value: Any) -> str:
    # bool before int: True is an int in Python
    if value is None:
        return NULL
    if isinstance(value, bool):
        return BOOLEAN
    if isinstance(value, (int, float)):
        return NUMBER
    if isinstance(value, str):
        return STRING
    if isinstance(value, dict):
        return OBJECT
    if isinstance(value, list):
        return ARRAY
    raise TypeError(f"not a model value: {type(value).__name__}")


def is_scalar(value: Any) -> bool:
    return kind_of(value) in SCALAR_KINDS


def values_equal(a: Any, b: Any) -> bool:
    """Deep equality that keeps booleans and numbers apart."""
    kind = kind_of(a)
    if kind != kind_of(b):
        return False
    if kind == OBJECT:
        return a.keys() == b.keys() and all(values_equal(a[k], b[k]) for k in a)
    if kind == ARRAY:
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    return a == b


def deep_copy(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: deep_copy(v) for k, v in value.items()}
    if isinstance(value, list):
        return [deep_copy(v) for v in value]
    return value


def reject_constant(name: str) -> Any:
    """`parse_constant` hook for `json.loads`: model values are finite numbers."""
    raise ValueError(f"non-finite number {name}")


def finite_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        reject_constant(text)
    return value


def to_field_value(obj: Any) -> Any:
    """Normalize parser output (YAML, TOML, XML) into a model value tree."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, float)):
        if isinstance(obj, float) and not math.isfinite(obj):
            return str(obj)
        return obj
    if isinstance(obj, (datetime.date, datetime.time)):
        return obj.isoformat()
    if isinstance(obj, dict):
        return {str(k): to_field_value(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        return [to_field_value(v) for v in obj]
    if isinstance(obj, bytes):
        return obj.decode("utf-8", errors="replace")
    return str(obj)
