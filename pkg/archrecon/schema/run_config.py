from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from archrecon import config
from archrecon.errors import ConfigurationError


class OrchestrationLimits(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    max_rounds: int = Field(default_factory=lambda: config.MAX_ROUNDS, gt=0)
    max_entities: int = Field(default_factory=lambda: config.MAX_ENTITIES, gt=0)


class RunConfig(BaseModel):
    """Everything one reconstruction needs besides the repository itself."""

    model_config = ConfigDict(extra="forbid")

    extractor_dirs: List[Path] = []
    overrides: Dict[str, Dict[str, Any]] = {}
    initial: Dict[str, Any] = {}
    limits: OrchestrationLimits = Field(default_factory=OrchestrationLimits)
    out: Optional[Path] = None
    keep_transient: bool = False
    strict: bool = False
    report: Optional[Path] = None
    builtins: bool = True

    @field_validator("extractor_dirs")
    @classmethod
    def directories_exist(cls, v: List[Path]) -> List[Path]:
        for directory in v:
            if not directory.is_dir():
                raise ValueError(f"extractor directory does not exist: {directory}")
        return v

    @classmethod
    def build(cls, **values: Any) -> "RunConfig":
        try:
            return cls(**{k: v for k, v in values.items() if v is not None})
        except ValidationError as e:
            err = e.errors()[0]
            where = ".".join(str(p) for p in err["loc"]) or "<run config>"
            raise ConfigurationError(f"{where}: {err['msg']}")


def parse_overrides(doc: Any, origin: str = "") -> Dict[str, Dict[str, Any]]:
    """Config file contents: extractor id -> object of option overrides."""
    label = f" in {origin}" if origin else ""
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigurationError(f"extractor config must map extractor ids to objects{label}")
    for extractor_id, options in doc.items():
        if not isinstance(options, dict):
            raise ConfigurationError(f"config for {extractor_id!r} must be an object{label}")
    return doc
