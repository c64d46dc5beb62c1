import pytest

from archrecon.extractors.builtin import BUILTIN_ORDER, builtin_extractors
from archrecon.extractors.loader import build_registry
from archrecon.errors import ConfigurationError
from archrecon.models.entity import strip_transient
from archrecon.schema.run_config import RunConfig
from archrecon.services.linking import resolve_links
from archrecon.services.pipeline import reconstruct_repository

from .util import FIXTURES

COMPOSE = FIXTURES / "compose"
EUREKA = FIXTURES / "eureka"


def reconstruct(repo, overrides=None, keep_transient=False):
    run_config = RunConfig(overrides=overrides or {})
    registry = build_registry([], run_config.overrides)
    model = reconstruct_repository(repo, run_config, registry)
    return model if keep_transient else strip_transient(model)


def services(model):
    return {service["name"]: service for service in model["microservices"]}


def test_builtins_register_in_order():
    assert [entry.id for _, entry in builtin_extractors()] == list(BUILTIN_ORDER)
    assert build_registry([]).ids() == list(BUILTIN_ORDER)
    assert len(build_registry([], builtins=False)) == 0


def test_unknown_override_id_is_a_configuration_error():
    with pytest.raises(ConfigurationError, match="no-such-extractor"):
        build_registry([], {"no-such-extractor": {}})


def test_override_must_match_config_schema():
    with pytest.raises(ConfigurationError):
        build_registry([], {"docker-compose-services": {"include": ["volumes"]}})


# docker-compose-services

def test_compose_services_default_facets():
    found = services(reconstruct(COMPOSE, keep_transient=True))
    assert list(found) == ["web", "api", "db"]
    assert found["web"]["$TYPE"] == "microservice"
    assert found["web"]["$path"] == str(COMPOSE / "web")
    assert found["api"]["$path"] == str(COMPOSE / "api")
    assert strip_transient(found["db"]) == {"$TYPE": "microservice", "name": "db", "image": "postgres"}
    for service in found.values():
        assert "ports" not in service and "environment" not in service and "dependencies" not in service


def test_compose_services_with_every_facet():
    overrides = {"docker-compose-services": {"include": ["services", "ports", "environment", "depends_on"]}}
    found = services(reconstruct(COMPOSE, overrides))
    assert found["web"]["ports"] == ["8080:80"]
    assert found["web"]["environment"] == {"API_URL": "http://api:9000"}
    assert found["api"]["ports"] == ["9000"]
    assert found["db"]["environment"] == ["POSTGRES_PASSWORD=secret"]
    [link] = found["web"]["dependencies"]
    assert link["$TYPE"] == "$LINK"
    assert link["kind"] == "depends_on"
    assert link["$TARGET"]["properties"]["name"] == {"const": "api"}


def test_more_facets_only_add_keys():
    plain = services(reconstruct(COMPOSE))
    rich = services(reconstruct(COMPOSE, {"docker-compose-services": {"include": ["services", "ports", "environment"]}}))
    assert set(plain) == set(rich)
    for name, service in plain.items():
        assert set(service) <= set(rich[name])
        for key, value in service.items():
            assert rich[name][key] == value


def test_reconstruction_is_repeatable():
    assert reconstruct(COMPOSE) == reconstruct(COMPOSE)


# language-detect, maven-detect, nodejs-detect, spring-endpoints

def test_languages():
    found = services(reconstruct(COMPOSE))
    assert found["web"]["languages"] == ["JavaScript"]
    assert found["api"]["languages"] == ["Python"]
    assert "languages" not in found["db"]


def test_language_extensions_can_be_overridden():
    found = services(reconstruct(COMPOSE, {"language-detect": {"extensions": {".py": "Python"}}}))
    assert found["api"]["languages"] == ["Python"]
    assert "languages" not in found["web"]


def test_maven_coordinates():
    orders = services(reconstruct(EUREKA))["orders"]
    assert orders["buildTool"] == "maven"
    assert orders["dependencies"][:2] == [
        "org.springframework.boot:spring-boot-starter-web",
        "org.springframework.cloud:spring-cloud-starter-netflix-eureka-client",
    ]


def test_nodejs_dependencies(tmp_path):
    (tmp_path / "docker-compose.yml").write_text("services:\n  ui:\n    build: ./ui\n")
    (tmp_path / "ui").mkdir()
    (tmp_path / "ui" / "package.json").write_text('{"name": "ui", "dependencies": {"express": "^4", "pg": "^8"}}')
    ui = services(reconstruct(tmp_path))["ui"]
    assert ui["buildTool"] == "npm"
    assert ui["dependencies"] == ["express", "pg"]


def test_build_paths_outside_the_repository_are_dropped(tmp_path):
    repo, sibling = tmp_path / "repo", tmp_path / "sibling"
    repo.mkdir()
    sibling.mkdir()
    (sibling / "Main.java").write_text("public class Main {}\n")
    (repo / "docker-compose.yml").write_text(
        f"services:\n  relative:\n    build: ../sibling\n  absolute:\n    build: {sibling}\n"
    )
    found = services(reconstruct(repo, keep_transient=True))
    for name in ("relative", "absolute"):
        assert "$path" not in found[name]
        assert "languages" not in found[name]


def test_spring_endpoints():
    found = services(reconstruct(EUREKA))
    assert found["orders"]["endpoints"] == [
        {"method": "GET", "path": "/orders/{id}"},
        {"method": "POST", "path": "/orders"},
    ]
    assert found["users"]["endpoints"] == [
        {"method": "GET", "path": "/users"},
        {"method": "DELETE", "path": "/users/{id}"},
    ]
    assert "endpoints" not in found["registry"]


def test_request_mapping_methods(tmp_path):
    (tmp_path / "docker-compose.yml").write_text("services:\n  api:\n    build: ./api\n")
    (tmp_path / "api").mkdir()
    (tmp_path / "api" / "Api.java").write_text(
        "public class Api {\n"
        '    @RequestMapping(value = "/a", method = RequestMethod.PUT)\n'
        "    void a() {}\n"
        '    @RequestMapping("/b")\n'
        "    void b() {}\n"
        "}\n"
    )
    api = services(reconstruct(tmp_path))["api"]
    assert api["endpoints"] == [{"method": "PUT", "path": "/a"}, {"method": "ANY", "path": "/b"}]


def java_service(tmp_path, source):
    (tmp_path / "docker-compose.yml").write_text("services:\n  api:\n    build: ./api\n")
    (tmp_path / "api").mkdir()
    (tmp_path / "api" / "Api.java").write_text(source)
    return services(reconstruct(tmp_path))["api"]


def test_class_word_in_comments_does_not_end_the_type_level_prefix(tmp_path):
    api = java_service(
        tmp_path,
        "// this class handles orders\n"
        "/* see class OrdersClient */\n"
        '@RequestMapping("/orders")\n'
        "public class Api {\n"
        '    @GetMapping("/{id}")\n'
        "    void one() {}\n"
        "    // @PostMapping(\"/ignored\")\n"
        "}\n",
    )
    assert api["endpoints"] == [{"method": "GET", "path": "/orders/{id}"}]


def test_mapping_with_several_paths(tmp_path):
    api = java_service(
        tmp_path,
        '@RequestMapping({"/v1", "/v2"})\n'
        "public class Api {\n"
        '    @GetMapping({"/a", "/b"})\n'
        "    void a() {}\n"
        '    @PostMapping(path = "/c", produces = "application/json")\n'
        "    void c() {}\n"
        "}\n",
    )
    assert api["endpoints"] == [
        {"method": "GET", "path": "/v1/a"},
        {"method": "GET", "path": "/v1/b"},
        {"method": "GET", "path": "/v2/a"},
        {"method": "GET", "path": "/v2/b"},
        {"method": "POST", "path": "/v1/c"},
        {"method": "POST", "path": "/v2/c"},
    ]


# spring-eureka

def test_eureka_clients_link_to_the_server():
    model = reconstruct(EUREKA)
    found = services(model)
    assert found["registry"]["eurekaServer"] is True
    assert "eurekaServer" not in found["orders"]

    resolved, report = resolve_links(model)
    assert [entry.outcome for entry in report] == ["resolved", "resolved"]
    assert {entry.target for entry in report} == {"/microservices/0"}
    assert [entry.link for entry in report] == ["/microservices/1/dependencies/2", "/microservices/2/dependencies/0"]
    assert resolved["microservices"][2]["dependencies"][0]["target"] == "/microservices/0"


def test_two_eureka_servers_are_ambiguous():
    model = reconstruct(EUREKA)
    model["microservices"][2]["eurekaServer"] = True
    _, report = resolve_links(model)
    outcomes = {entry.link: entry for entry in report}
    orders_link = outcomes["/microservices/1/dependencies/2"]
    assert orders_link.outcome == "ambiguous"
    assert orders_link.candidates == ["/microservices/0", "/microservices/2"]
