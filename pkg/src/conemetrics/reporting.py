"""Result containers shared by property checks, validators, and suites."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays so json.dumps accepts them."""
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    return obj


@dataclass
class CheckOutcome:
    """One named check: pass/fail plus the worst measured violation.

    A failing check always carries a replayable counterexample payload
    (plain JSON-compatible dict).
    """

    name: str
    passed: bool
    samples: int
    max_violation: float
    counterexample: dict | None = None
    covers: str = ""

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "passed": self.passed,
            "samples": self.samples,
            "max_violation": to_jsonable(self.max_violation),
            "counterexample": to_jsonable(self.counterexample),
        }
        if self.covers:
            out["covers"] = self.covers
        return out


@dataclass
class PropertyReport:
    """A bundle of check outcomes about one subject (a cone, a map, ...)."""

    subject: str
    outcomes: list[CheckOutcome] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    def failures(self) -> list[CheckOutcome]:
        return [o for o in self.outcomes if not o.passed]

    def outcome(self, name: str) -> CheckOutcome:
        for o in self.outcomes:
            if o.name == name:
                return o
        raise KeyError(name)

    def to_dict(self) -> dict:
        out = {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [o.to_dict() for o in self.outcomes],
        }
        if self.details:
            out["details"] = to_jsonable(self.details)
        return out
