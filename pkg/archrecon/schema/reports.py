import json
from typing import Any, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, RootModel, ValidationInfo, field_validator


def _render(value: Any) -> str:
    return json.dumps(value, sort_keys=True, ensure_ascii=False)


class Conflict(BaseModel):
    model_config = ConfigDict(frozen=True)

    path: str
    left: Any
    right: Any
    left_source: str = Field(..., min_length=1)
    right_source: str = Field(..., min_length=1)
    # where `right` sits in the right-hand tree when identity pairing moved it
    right_path: Optional[str] = None

    @field_validator("right_path")
    @classmethod
    def drop_when_same(cls, v: Optional[str], info: ValidationInfo) -> Optional[str]:
        return None if v == info.data.get("path") else v

    @property
    def right_location(self) -> str:
        return self.path if self.right_path is None else self.right_path

    def render(self) -> str:
        where = "" if self.right_path is None else f" at {self.right_path}"
        return (
            f"conflict at {self.path}: {_render(self.left)} (from {self.left_source}) "
            f"vs {_render(self.right)} (from {self.right_source}{where})"
        )

    def swapped(self) -> "Conflict":
        return Conflict(
            path=self.right_location,
            right_path=self.path,
            left=self.right,
            right=self.left,
            left_source=self.right_source,
            right_source=self.left_source,
        )


class LinkResolution(BaseModel):
    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "link": "/microservices/0/dependencies/0",
                "outcome": "resolved",
                "target": "/microservices/1",
                "candidates": ["/microservices/1"],
            }
        }
    )

    link: str
    outcome: Literal["resolved", "unresolved", "ambiguous"]
    target: Optional[str] = None
    candidates: List[str] = []

    @property
    def ok(self) -> bool:
        return self.outcome == "resolved"

    def render(self) -> str:
        if self.outcome == "resolved":
            return f"resolved {self.link} -> {self.target}"
        if self.outcome == "ambiguous":
            return f"ambiguous {self.link}: {', '.join(self.candidates)}"
        return f"unresolved {self.link}"


class ResolutionReport(RootModel[List[LinkResolution]]):
    root: List[LinkResolution] = []

    def __iter__(self):
        return iter(self.root)

    def __len__(self) -> int:
        return len(self.root)

    @property
    def failures(self) -> List[LinkResolution]:
        return [entry for entry in self.root if not entry.ok]
