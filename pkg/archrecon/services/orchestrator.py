"""Schema-gated extractor dispatch over the model until nothing is left to run."""
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Set, Tuple, Union

from pydantic import BaseModel

from archrecon.errors import AggregationConflict, DivergenceError, DuplicateExtractorId, ExtractorError, PathNotFound
from archrecon.models.entity import PATH_KEY, TYPE_KEY, UID_KEY, MODEL_TYPE, UidAllocator, find_entities
from archrecon.models.paths import get_path, set_path
from archrecon.models.value import deep_copy
from archrecon.schema.extractor_def import ExtractorDescriptor
from archrecon.schema.run_config import OrchestrationLimits
from archrecon.services.aggregation import aggregate
from archrecon.services.extractor_api import ExtractorAPI
from archrecon.services.schema_match import conforms

logger = logging.getLogger(__name__)

RunLedger = Set[Tuple[str, int]]


def _without_uids(value: Any) -> Any:
    # uids from an earlier run would collide with this run's
    if isinstance(value, dict):
        return {k: _without_uids(v) for k, v in value.items() if k != UID_KEY}
    if isinstance(value, list):
        return [_without_uids(v) for v in value]
    return value


class ExtractorRegistry:
    """Extractors in registration order; ids are unique."""

    def __init__(self, descriptors: Iterable[ExtractorDescriptor] = ()):
        self._descriptors: List[ExtractorDescriptor] = []
        for descriptor in descriptors:
            self.register(descriptor)

    def register(self, descriptor: ExtractorDescriptor) -> "ExtractorRegistry":
        if descriptor.id in self:
            raise DuplicateExtractorId(descriptor.id)
        self._descriptors.append(descriptor)
        logger.debug("Registered %s extractor %s", descriptor.kind, descriptor.id)
        return self

    def ids(self) -> List[str]:
        return [d.id for d in self._descriptors]

    def __contains__(self, extractor_id: str) -> bool:
        return any(d.id == extractor_id for d in self._descriptors)

    def __iter__(self) -> Iterator[ExtractorDescriptor]:
        return iter(self._descriptors)

    def __len__(self) -> int:
        return len(self._descriptors)


def register_extractor(registry: ExtractorRegistry, descriptor: ExtractorDescriptor) -> ExtractorRegistry:
    return registry.register(descriptor)


class ExtractorContext(ExtractorAPI):
    """What a behavior gets besides its entity copy."""

    def __init__(self, root: Union[str, Path], config: Dict[str, Any], extractor_id: str, entity_path: str):
        super().__init__(root, config)
        self.extractor_id = extractor_id
        self.entity_path = entity_path


class RunStats(BaseModel):
    rounds: int = 0
    executions: int = 0
    entities: int = 0


class Orchestrator:
    def __init__(
        self,
        registry: Union[ExtractorRegistry, Iterable[ExtractorDescriptor]],
        limits: Optional[OrchestrationLimits] = None,
        workspace: Union[str, Path, None] = None,
    ):
        self.registry = registry if isinstance(registry, ExtractorRegistry) else ExtractorRegistry(registry)
        self.limits = limits or OrchestrationLimits()
        self.workspace = Path(workspace) if workspace is not None else None
        self.ledger: RunLedger = set()
        self.stats = RunStats()
        self._uids = UidAllocator()

    def run(self, initial: Dict[str, Any]) -> Dict[str, Any]:
        if not isinstance(initial, dict) or initial.get(TYPE_KEY) != MODEL_TYPE:
            raise ValueError("the initial model must be an object with $TYPE = $MODEL")
        model = _without_uids(initial)
        self._uids.assign(model)

        while True:
            if self.stats.rounds >= self.limits.max_rounds:
                raise DivergenceError(f"no fixpoint after {self.limits.max_rounds} rounds")
            self.stats.rounds += 1
            executed = 0
            for path, snapshot in find_entities(model):
                uid = snapshot.get(UID_KEY)
                for descriptor in self.registry:
                    located = self._locate(model, uid, path)
                    if located is None:
                        break
                    path, entity = located
                    if (descriptor.id, uid) in self.ledger or not conforms(entity, descriptor.input_schema):
                        continue
                    self.ledger.add((descriptor.id, uid))
                    model = self._dispatch(model, descriptor, path, entity)
                    executed += 1
            self.stats.executions += executed
            self.stats.entities = len(find_entities(model))
            logger.info("Round %d: %d extractor run(s), %d entities", self.stats.rounds, executed, self.stats.entities)
            if executed == 0:
                break

        logger.info(
            "Fixpoint after %d round(s), %d execution(s), %d entities",
            self.stats.rounds, self.stats.executions, self.stats.entities,
        )
        return model

    def _dispatch(self, model: Dict[str, Any], descriptor: ExtractorDescriptor, path: str, entity: Dict[str, Any]):
        logger.debug("Running %s on %s", descriptor.id, path or "/")
        context = ExtractorContext(self._root_for(entity), descriptor.config, descriptor.id, path)
        try:
            returned = descriptor.behavior(deep_copy(entity), context)
        except AggregationConflict:
            raise
        except Exception as e:
            raise ExtractorError(descriptor.id, e, path)
        if not isinstance(returned, dict):
            raise ExtractorError(descriptor.id, TypeError(f"returned {type(returned).__name__}, not an object"), path)

        merged = aggregate(get_path(model, path), returned, "model", descriptor.id, base_path=path)
        model = set_path(model, path, merged)
        self._uids.assign(model)
        count = len(find_entities(model))
        if count > self.limits.max_entities:
            raise DivergenceError(f"{count} entities exceed the limit of {self.limits.max_entities}")
        return model

    def _root_for(self, entity: Dict[str, Any]) -> Path:
        if isinstance(entity.get(PATH_KEY), str):
            return Path(entity[PATH_KEY])
        if self.workspace is not None:
            return self.workspace
        return Path(".")

    @staticmethod
    def _locate(model: Dict[str, Any], uid: Any, hint: str) -> Optional[Tuple[str, Dict[str, Any]]]:
        try:
            entity = get_path(model, hint)
        except PathNotFound:
            entity = None
        if isinstance(entity, dict) and entity.get(UID_KEY) == uid:
            return hint, entity
        for path, entity in find_entities(model):
            if entity.get(UID_KEY) == uid:
                return path, entity
        return None


def run(
    initial: Dict[str, Any],
    registry: Union[ExtractorRegistry, Iterable[ExtractorDescriptor]],
    limits: Optional[OrchestrationLimits] = None,
    workspace: Union[str, Path, None] = None,
) -> Dict[str, Any]:
    return Orchestrator(registry, limits, workspace).run(initial)
