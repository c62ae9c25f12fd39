from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from src.logic.helpers import SCHEMA_VERSION, TOOL_VERSION


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(data: Any) -> str:
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


@dataclass
class Check:
    """Outcome of one identity or count comparison. Failures are data, not exceptions."""
    name: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)
    counterexample: Optional[Dict[str, Any]] = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "details": self.details}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Check":
        return cls(data["name"], bool(data["passed"]), dict(data.get("details", {})), data.get("counterexample"))


@dataclass
class Report:
    campaign: str
    params: Dict[str, Any] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    seed: Optional[int] = None
    input_digest: str = ""
    timings: Dict[str, float] = field(default_factory=dict)
    payload: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, checks: List[Check]) -> None:
        self.checks.extend(checks)

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self, with_timings: bool = False) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": TOOL_VERSION,
            "campaign": self.campaign,
            "params": self.params,
            "seed": self.seed,
            "input_digest": self.input_digest,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "payload": self.payload,
        }
        if with_timings:
            out["timings"] = self.timings
        return out

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"[{status}] {self.campaign}: {len(self.checks) - len(self.failures())}/{len(self.checks)} checks passed"]
        for c in self.failures()[:10]:
            lines.append(f"  [FAIL] {c.name} {canonical_json(c.details)}")
        return "\n".join(lines)
