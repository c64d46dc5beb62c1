import json
import random
from pathlib import Path
from typing import Any, Callable, Dict, List, Tuple

from archrecon.models.entity import MODEL_TYPE, new_model
from archrecon.models.paths import get_path
from archrecon.schema.extractor_def import ExtractorDescriptor
from archrecon.schema.schema_node import load_schema

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = Path(__file__).resolve().parent / "fixtures"

SEEDS = range(200)


def read_json(path: Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def canonical(value: Any) -> Any:
    """Arrays sorted by their elements' canonical JSON, recursively."""
    if isinstance(value, dict):
        return {k: canonical(v) for k, v in value.items()}
    if isinstance(value, list):
        items = [canonical(v) for v in value]
        return sorted(items, key=lambda v: json.dumps(v, sort_keys=True))
    return value


def dereference_targets(model: Any, root: Any = None) -> Any:
    """Replace resolved link targets by the target's name so array order stops mattering."""
    root = model if root is None else root
    if isinstance(model, dict):
        out = {}
        for key, value in model.items():
            if key == "target" and model.get("$TYPE") == "$LINK":
                out[key] = get_path(root, value).get("name")
            else:
                out[key] = dereference_targets(value, root)
        return out
    if isinstance(model, list):
        return [dereference_targets(v, root) for v in model]
    return model


def native(extractor_id: str, schema: Dict[str, Any], behavior, config: Dict[str, Any] = None) -> ExtractorDescriptor:
    return ExtractorDescriptor(
        id=extractor_id,
        input_schema=load_schema(schema),
        config=config or {},
        behavior=behavior,
    )


def typed(type_tag: str, *required: str) -> Dict[str, Any]:
    return {
        "type": "object",
        "properties": {"$TYPE": {"const": type_tag}},
        "required": ["$TYPE", *required],
    }


# generated trees

SCALARS: List[Any] = [None, True, False, 0, 1, 2, "x", "y", "1.0", "2.0"]
KEYS = ["a", "b", "c", "flags", "version"]
NAMES = ["svc0", "svc1", "svc2", "svc3", "svc4"]


def random_scalar(rng: random.Random) -> Any:
    return rng.choice(SCALARS)


def random_entity(rng: random.Random, name: str, depth: int) -> Dict[str, Any]:
    entity = {"$TYPE": "svc", "name": name}
    entity.update(random_object(rng, depth - 1, max_keys=2))
    return entity


def random_array(rng: random.Random, depth: int) -> List[Any]:
    if depth <= 0 or rng.random() < 0.5:
        # distinct scalars only: equal ones would dedupe against each other
        return rng.sample(["p", "q", "r", "s", 7, 8, 9], rng.randint(0, 4))
    # unique names in random order, so the same entity often sits at another index on the other side
    return [random_entity(rng, name, depth) for name in rng.sample(NAMES, rng.randint(0, 3))]


def random_value(rng: random.Random, depth: int) -> Any:
    roll = rng.random()
    if depth <= 0 or roll < 0.5:
        return random_scalar(rng)
    if roll < 0.75:
        return random_object(rng, depth - 1)
    return random_array(rng, depth - 1)


def random_object(rng: random.Random, depth: int, max_keys: int = 4) -> Dict[str, Any]:
    keys = rng.sample(KEYS, rng.randint(0, max_keys))
    return {key: random_value(rng, depth) for key in keys}


def random_model(rng: random.Random, depth: int = 3) -> Dict[str, Any]:
    model = random_object(rng, depth)
    if rng.random() < 0.7:
        model["services"] = random_array(rng, depth)
    return model


# generated extractor sets

ENTITY_TYPES = [MODEL_TYPE, "microservice", "endpoint"]


def random_initial_model(rng: random.Random) -> Dict[str, Any]:
    services = []
    for i in range(rng.randint(0, 4)):
        service = {"$TYPE": "microservice", "name": f"s{i}"}
        if rng.random() < 0.5:
            service["endpoints"] = [{"$TYPE": "endpoint", "name": f"s{i}-e{j}"} for j in range(rng.randint(1, 3))]
        services.append(service)
    return new_model("/repo", microservices=services)


def recording(extractor_id: str, field: str, make_value: Callable[[], Any], calls: List[Tuple[str, int]]):
    def behavior(entity, context):
        calls.append((extractor_id, entity["$uid"]))
        entity[field] = make_value()
        return entity

    return behavior


def random_extractors(
    rng: random.Random, calls: List[Tuple[str, int]]
) -> Tuple[List[ExtractorDescriptor], Dict[int, str]]:
    """Extractor `x<i>` writes `f<i>` on one entity type, sometimes only once an earlier `f<j>` is there.

    Returns the shuffled descriptors and the entity type each `f<i>` lands on.
    """
    targets: Dict[int, str] = {}
    descriptors = []
    for i in range(rng.randint(1, 8)):
        type_tag = rng.choice(ENTITY_TYPES)
        earlier = [j for j, target in targets.items() if target == type_tag]
        required = [f"f{rng.choice(earlier)}"] if earlier and rng.random() < 0.6 else []
        targets[i] = type_tag
        behavior = recording(f"x{i}", f"f{i}", lambda i=i: i, calls)
        descriptors.append(native(f"x{i}", typed(type_tag, *required), behavior))
    if rng.random() < 0.5:
        def created():
            return [{"$TYPE": "microservice", "name": "created"}]

        descriptors.append(native("create", typed(MODEL_TYPE), recording("create", "microservices", created, calls)))
    rng.shuffle(descriptors)
    return descriptors, targets
