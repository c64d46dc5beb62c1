import pytest

from archrecon.errors import MalformedLinkError
from archrecon.models.paths import get_path
from archrecon.models.value import deep_copy
from archrecon.services.linking import collect_links, resolve_links
from archrecon.services.schema_match import conforms
from archrecon.schema.schema_node import load_schema

from .util import FIXTURES, read_json

LINK_PATH = "/microservices/0/dependencies/0"


def linked_model():
    return read_json(FIXTURES / "link" / "model.json")


def test_link_resolves_to_the_only_match():
    model = linked_model()
    resolved, report = resolve_links(model)
    [entry] = report
    assert entry.link == LINK_PATH
    assert entry.outcome == "resolved"
    assert entry.target == "/microservices/1"
    assert get_path(resolved, LINK_PATH)["target"] == "/microservices/1"
    assert model == linked_model()


def test_resolved_target_conforms_to_the_link_schema():
    resolved, report = resolve_links(linked_model())
    for entry in report:
        link = get_path(resolved, entry.link)
        assert conforms(get_path(resolved, link["target"]), load_schema(link["$TARGET"]))


def test_missing_target_is_unresolved():
    model = linked_model()
    del model["microservices"][1]
    resolved, report = resolve_links(model)
    [entry] = report
    assert entry.outcome == "unresolved"
    assert entry.candidates == []
    assert "target" not in get_path(resolved, LINK_PATH)
    assert report.failures == [entry]


def test_two_matches_are_ambiguous():
    model = linked_model()
    model["microservices"].append({"$TYPE": "microservice", "name": "bar", "replica": True})
    resolved, report = resolve_links(model)
    [entry] = report
    assert entry.outcome == "ambiguous"
    assert entry.candidates == ["/microservices/1", "/microservices/2"]
    assert "target" not in get_path(resolved, LINK_PATH)
    assert entry.render() == f"ambiguous {LINK_PATH}: /microservices/1, /microservices/2"


def test_resolution_is_idempotent():
    once, first = resolve_links(linked_model())
    twice, second = resolve_links(once)
    assert once == twice
    assert first.model_dump() == second.model_dump()


def test_stale_target_is_cleared():
    model = linked_model()
    get_path(model, LINK_PATH)["target"] = "/microservices/7"
    del model["microservices"][1]
    resolved, _ = resolve_links(model)
    assert "target" not in get_path(resolved, LINK_PATH)


def test_missing_root_is_unresolved():
    model = linked_model()
    get_path(model, LINK_PATH)["$ROOT"] = "/services"
    _, report = resolve_links(model)
    assert [entry.outcome for entry in report] == ["unresolved"]


def test_links_are_never_candidates():
    model = linked_model()
    get_path(model, LINK_PATH)["$TARGET"] = {"type": "object", "required": ["$TYPE"]}
    _, report = resolve_links(model)
    [entry] = report
    # foo and bar match; the link object and the $MODEL outside $ROOT do not
    assert entry.candidates == ["/microservices/0", "/microservices/1"]


def test_model_without_links():
    model = {"$TYPE": "$MODEL", "microservices": [{"$TYPE": "microservice", "name": "solo"}]}
    resolved, report = resolve_links(model)
    assert resolved == model
    assert list(report) == []


def test_links_are_collected_in_preorder():
    model = linked_model()
    second = deep_copy(get_path(model, LINK_PATH))
    model["microservices"][1]["dependencies"] = [second]
    assert [path for path, _ in collect_links(model)] == [LINK_PATH, "/microservices/1/dependencies/0"]


@pytest.mark.parametrize("breakage", [
    lambda link: link.pop("$ROOT"),
    lambda link: link.pop("$TARGET"),
    lambda link: link.update({"$ROOT": 3}),
    lambda link: link.update({"$ROOT": "microservices"}),
    lambda link: link.update({"$TARGET": {"oneOf": []}}),
])
def test_malformed_links(breakage):
    model = linked_model()
    breakage(get_path(model, LINK_PATH))
    with pytest.raises(MalformedLinkError) as excinfo:
        resolve_links(model)
    assert excinfo.value.path == LINK_PATH
    assert excinfo.value.exit_code == 4
