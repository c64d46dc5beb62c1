"""Recursive-union merging of model trees with conflict detection.

Objects union their keys, equal scalars unify, array elements pair up when they
are aggregatable and are appended otherwise. Anything else is a conflict.
"""
import logging
from typing import Any, Iterable, List, Optional, Sequence, Tuple

from archrecon.errors import AggregationConflict
from archrecon.models.entity import TYPE_KEY
from archrecon.models.paths import make_path, split_path
from archrecon.models.value import ARRAY, OBJECT, deep_copy, is_scalar, kind_of, values_equal
from archrecon.schema.reports import Conflict

logger = logging.getLogger(__name__)

# Array elements of the same type that agree on one of these keys describe the same entity.
IDENTITY_KEYS: Tuple[str, ...] = ("name",)

_UNPAIRED = object()


def _same_type(x: dict, y: dict) -> bool:
    if TYPE_KEY in x and TYPE_KEY in y:
        return values_equal(x[TYPE_KEY], y[TYPE_KEY])
    return True


def _same_identity(x: Any, y: Any, identity_keys: Sequence[str]) -> bool:
    if not (isinstance(x, dict) and isinstance(y, dict)) or not _same_type(x, y):
        return False
    return any(
        key in x and key in y and is_scalar(x[key]) and values_equal(x[key], y[key])
        for key in identity_keys
    )


def _shares_evidence(x: dict, y: dict) -> bool:
    # `$` keys (transient or framework) never count as evidence
    for key, value in x.items():
        if key.startswith("$") or key not in y:
            continue
        if is_scalar(value) and values_equal(value, y[key]):
            return True
    return False


class Aggregator:
    def __init__(
        self,
        left_source: str = "left",
        right_source: str = "right",
        collect: bool = False,
        identity_keys: Sequence[str] = IDENTITY_KEYS,
    ):
        self.left_source = left_source
        self.right_source = right_source
        self.collect = collect
        self.identity_keys = tuple(identity_keys)
        self.conflicts: List[Conflict] = []

    def merge(self, a: Any, b: Any, base_path: str = "") -> Any:
        """Merge without raising in collect mode; conflicts accumulate on `self.conflicts`."""
        base = split_path(base_path)
        return self._merge(a, b, base, list(base))

    def _merge(self, a: Any, b: Any, left: List[Any], right: List[Any]) -> Any:
        kind_a, kind_b = kind_of(a), kind_of(b)
        if kind_a == OBJECT and kind_b == OBJECT:
            return self._merge_objects(a, b, left, right)
        if kind_a == ARRAY and kind_b == ARRAY:
            return self._merge_arrays(a, b, left, right)
        if is_scalar(a) and values_equal(a, b):
            return a
        self._conflict(left, right, a, b)
        return deep_copy(a)

    def _merge_objects(self, a: dict, b: dict, left: List[Any], right: List[Any]) -> dict:
        merged = {key: deep_copy(value) for key, value in a.items()}
        # sorted so the first conflict does not depend on argument order
        for key in sorted(a.keys() & b.keys()):
            merged[key] = self._merge(a[key], b[key], left + [key], right + [key])
        for key, value in b.items():
            if key not in a:
                merged[key] = deep_copy(value)
        return merged

    def _merge_arrays(self, a: list, b: list, left: List[Any], right: List[Any]) -> list:
        # identity partners may sit at different indices on each side; indices past
        # len(a) are elements appended from b and are addressed in the merged array
        result = [deep_copy(item) for item in a]
        for position, element in enumerate(b):
            index = self._identity_partner(result, element)
            if index is not None:
                result[index] = self._merge(result[index], element, left + [index], right + [position])
                continue
            for index, existing in enumerate(result):
                paired = self._pair(existing, element)
                if paired is not _UNPAIRED:
                    result[index] = paired
                    break
            else:
                result.append(deep_copy(element))
        return result

    def _identity_partner(self, result: list, element: Any) -> Optional[int]:
        for index, existing in enumerate(result):
            if _same_identity(existing, element, self.identity_keys):
                return index
        return None

    def _pair(self, x: Any, y: Any) -> Any:
        """Merged value when x and y are aggregatable, `_UNPAIRED` otherwise."""
        if values_equal(x, y):
            return deep_copy(x)
        if not (isinstance(x, dict) and isinstance(y, dict)) or not _same_type(x, y):
            return _UNPAIRED
        if not _shares_evidence(x, y):
            return _UNPAIRED
        try:
            return Aggregator(identity_keys=self.identity_keys)._merge_objects(x, y, [], [])
        except AggregationConflict:
            return _UNPAIRED

    def _conflict(self, left: List[Any], right: List[Any], a: Any, b: Any) -> None:
        conflict = Conflict(
            path=make_path(left),
            right_path=make_path(right),
            left=deep_copy(a),
            right=deep_copy(b),
            left_source=self.left_source,
            right_source=self.right_source,
        )
        if not self.collect:
            raise AggregationConflict([conflict])
        logger.debug("Collected %s", conflict.render())
        self.conflicts.append(conflict)


def aggregatable(x: Any, y: Any, identity_keys: Sequence[str] = IDENTITY_KEYS) -> bool:
    """Whether array aggregation would pair x with y instead of appending y."""
    if _same_identity(x, y, identity_keys):
        return True
    return Aggregator(identity_keys=identity_keys)._pair(x, y) is not _UNPAIRED


def aggregate(
    a: Any,
    b: Any,
    prov_a: str = "left",
    prov_b: str = "right",
    collect: bool = False,
    base_path: str = "",
) -> Any:
    aggregator = Aggregator(prov_a, prov_b, collect=collect)
    merged = aggregator.merge(a, b, base_path)
    if aggregator.conflicts:
        raise AggregationConflict(aggregator.conflicts)
    return merged


def aggregate_objects(a: dict, b: dict, prov_a: str = "left", prov_b: str = "right") -> dict:
    return Aggregator(prov_a, prov_b)._merge_objects(a, b, [], [])


def aggregate_arrays(a: list, b: list, prov_a: str = "left", prov_b: str = "right") -> list:
    return Aggregator(prov_a, prov_b)._merge_arrays(a, b, [], [])


def aggregate_many(trees: Sequence[Tuple[str, Any]], collect: bool = False) -> Any:
    """Left fold in the given order; the accumulated side is named after every input folded so far."""
    if not trees:
        raise ValueError("aggregate_many needs at least one tree")
    first_source, merged = trees[0]
    merged = deep_copy(merged)
    sources = [first_source]
    conflicts: List[Conflict] = []
    for source, tree in trees[1:]:
        aggregator = Aggregator(_describe(sources), source, collect=collect)
        merged = aggregator.merge(merged, tree)
        conflicts.extend(aggregator.conflicts)
        sources.append(source)
        logger.info("Aggregated %s (%d conflicts so far)", source, len(conflicts))
    if conflicts:
        raise AggregationConflict(conflicts)
    return merged


def _describe(sources: Iterable[str]) -> str:
    return "+".join(sources)
