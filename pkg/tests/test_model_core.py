import json
import random
import re

import pytest

from archrecon.errors import ModelFileError, PathMalformed, PathNotFound
from archrecon.models.entity import (
    UID_KEY,
    UidAllocator,
    find_entities,
    is_transient_key,
    new_model,
    strip_transient,
)
from archrecon.models.paths import child_path, get_path, make_path, set_path, split_path
from archrecon.models.value import deep_copy, kind_of, to_field_value, values_equal
from archrecon.storage.model_files import dumps_model, loads_model

from .util import FIXTURES, SEEDS, read_json

FIG6_OUTPUT = {
    "$TYPE": "$MODEL",
    "$path": "/repo",
    "microservices": [
        {"$TYPE": "microservice", "name": "service1", "$path": "/repo/service1", "java": True}
    ],
}

TRANSIENT = re.compile(r"^\$[a-z0-9_]+$")


def test_strip_transient_removes_path_keeps_type():
    assert strip_transient(FIG6_OUTPUT) == {
        "$TYPE": "$MODEL",
        "microservices": [{"$TYPE": "microservice", "name": "service1", "java": True}],
    }


def test_strip_transient_empty_and_nested_target():
    assert strip_transient({}) == {}
    assert strip_transient({"$TARGET": {"$notakey": 1}}) == {"$TARGET": {}}


def test_strip_transient_does_not_mutate_input():
    model = deep_copy(FIG6_OUTPUT)
    strip_transient(model)
    assert model == FIG6_OUTPUT


@pytest.mark.parametrize("key,transient", [
    ("$path", True),
    ("$uid", True),
    ("$a_1", True),
    ("$TYPE", False),
    ("$ROOT", False),
    ("$TARGET", False),
    ("$Path", False),
    ("$", False),
    ("$x-y", False),
    ("path", False),
])
def test_transient_key_pattern(key, transient):
    assert is_transient_key(key) is transient


STRIP_KEYS = ["$path", "$uid", "$a_1", "$TYPE", "$ROOT", "$Mixed", "$", "$x-y", "name", "b"]


def _random_tree(rng, depth):
    if depth <= 0 or rng.random() < 0.3:
        return rng.choice([None, True, 1, "s"])
    if rng.random() < 0.7:
        return {k: _random_tree(rng, depth - 1) for k in rng.sample(STRIP_KEYS, rng.randint(0, 4))}
    return [_random_tree(rng, depth - 1) for _ in range(rng.randint(0, 3))]


def _check_exact(original, stripped):
    if isinstance(original, dict):
        assert set(stripped) == {k for k in original if not TRANSIENT.match(k)}
        for key, value in stripped.items():
            _check_exact(original[key], value)
    elif isinstance(original, list):
        assert len(stripped) == len(original)
        for before, after in zip(original, stripped):
            _check_exact(before, after)
    else:
        assert stripped == original


@pytest.mark.parametrize("seed", SEEDS)
def test_strip_transient_idempotent_and_exact(seed):
    tree = _random_tree(random.Random(seed), 4)
    once = strip_transient(tree)
    assert strip_transient(once) == once
    _check_exact(tree, once)


def test_get_path_examples():
    assert get_path(FIG6_OUTPUT, "/microservices/0/name") == "service1"
    assert get_path(FIG6_OUTPUT, "") is FIG6_OUTPUT
    assert get_path({"a": [{"b~c": 1}]}, "/a/0/b~0c") == 1
    assert get_path({"a/b": 2}, "/a~1b") == 2


@pytest.mark.parametrize("path", ["/missing", "/microservices/1", "/microservices/01", "/microservices/x", "/$TYPE/deeper"])
def test_get_path_not_found(path):
    with pytest.raises(PathNotFound):
        get_path(FIG6_OUTPUT, path)


def test_get_path_malformed():
    with pytest.raises(PathMalformed):
        get_path(FIG6_OUTPUT, "microservices")


def test_make_and_split_path_escape():
    path = make_path(["a/b", "c~d", 0])
    assert path == "/a~1b/c~0d/0"
    assert split_path(path) == ["a/b", "c~d", "0"]
    assert make_path([]) == ""
    assert child_path("/microservices", 3) == "/microservices/3"


def test_set_path_replaces_existing_node():
    model = deep_copy(FIG6_OUTPUT)
    set_path(model, "/microservices/0/java", False)
    assert model["microservices"][0]["java"] is False
    assert set_path(model, "", {"x": 1}) == {"x": 1}
    with pytest.raises(PathNotFound):
        set_path(model, "/microservices/5", {})


def test_find_entities_preorder():
    found = find_entities(FIG6_OUTPUT)
    assert [path for path, _ in found] == ["", "/microservices/0"]
    assert found[1][1]["name"] == "service1"


def test_find_entities_untyped_root():
    assert find_entities({"x": 1}) == []


def test_find_entities_skips_links_and_target_schemas():
    model = read_json(FIXTURES / "link" / "model.json")
    paths = [path for path, _ in find_entities(model)]
    assert paths == ["", "/microservices/0", "/microservices/1"]


def test_find_entities_paths_resolve():
    model = read_json(FIXTURES / "link" / "model.json")
    for path, entity in find_entities(model):
        assert get_path(model, path) is entity


def test_uid_allocator_assigns_once():
    model = new_model("/repo", microservices=[{"$TYPE": "microservice", "name": "a"}])
    allocator = UidAllocator()
    assert allocator.assign(model) == 2
    assert allocator.assign(model) == 0
    model["microservices"].append({"$TYPE": "microservice", "name": "b"})
    assert allocator.assign(model) == 1
    uids = [entity[UID_KEY] for _, entity in find_entities(model)]
    assert len(set(uids)) == 3


def test_values_equal_keeps_booleans_and_numbers_apart():
    assert values_equal(1, 1.0)
    assert not values_equal(1, True)
    assert not values_equal(0, False)
    assert values_equal({"a": [1, {"b": None}]}, {"a": [1, {"b": None}]})
    assert not values_equal([1, 2], [2, 1])
    assert kind_of(True) == "boolean"


def test_to_field_value_normalizes_parser_output():
    import datetime

    assert to_field_value({1: (datetime.date(2024, 1, 2), float("inf"))}) == {"1": ["2024-01-02", "inf"]}


def test_dumps_model_is_canonical():
    text = dumps_model({"b": 1, "$path": "/x", "a": {"d": "é", "c": [2, 1]}})
    assert text == '{\n  "a": {\n    "c": [\n      2,\n      1\n    ],\n    "d": "é"\n  },\n  "b": 1\n}\n'
    assert "$path" in dumps_model({"$path": "/x"}, keep_transient=True)


@pytest.mark.parametrize("seed", SEEDS)
def test_serialization_round_trip(seed):
    tree = {"root": _random_tree(random.Random(seed), 4)}
    assert values_equal(loads_model(dumps_model(tree, keep_transient=True)), tree)


def test_integers_survive_export():
    assert json.loads(dumps_model({"n": 2 ** 53}))["n"] == 2 ** 53


def test_model_files_reject_non_finite_numbers():
    with pytest.raises(ModelFileError, match="non-finite number NaN"):
        loads_model('{"$TYPE": "$MODEL", "load": NaN}')
