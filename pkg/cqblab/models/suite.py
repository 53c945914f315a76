from typing import Any

from pydantic import BaseModel, Field


class CriterionResult(BaseModel):
    """One acceptance criterion with what was measured against what bound."""
    number: int
    name: str
    passed: bool
    measured: dict[str, Any] = Field(default_factory=dict)
    tolerance: float
    detail: str | None = None


class SuiteReport(BaseModel):
    criteria: list[CriterionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)
