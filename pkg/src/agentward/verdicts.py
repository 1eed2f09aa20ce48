"""Three-way verdicts, severities, and the Decision record.

Every enforcement surface in the package (graph mediation, rule engine,
skill scanner, code gate) speaks the same PASS / BLOCK / REVIEW vocabulary,
so the types live in one place.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum


class Verdict(str, Enum):
    PASS = "PASS"
    BLOCK = "BLOCK"
    REVIEW = "REVIEW"


class Severity(str, Enum):
    LOW = "LOW"
    MEDIUM = "MEDIUM"
    HIGH = "HIGH"
    CRITICAL = "CRITICAL"

    @property
    def rank(self) -> int:
        return _SEVERITY_RANK[self]


_SEVERITY_RANK = {
    Severity.LOW: 0,
    Severity.MEDIUM: 1,
    Severity.HIGH: 2,
    Severity.CRITICAL: 3,
}

#: Provenance markers for decisions not attributable to specific rules.
PROVENANCE_JUDGE = "judge"
PROVENANCE_DEFAULT = "default"


@dataclass(frozen=True)
class Decision:
    """The outcome of one enforcement evaluation.

    ``provenance`` names what produced the verdict: a list of rule ids, a
    judge id (prefixed ``judge:``), or ``default`` for the conservative
    fallback path.
    """

    verdict: Verdict
    severity: Severity = Severity.LOW
    rationale: str = ""
    provenance: tuple[str, ...] = field(default_factory=tuple)
    elapsed: float = 0.0

    @property
    def is_rule_decision(self) -> bool:
        return bool(self.provenance) and not any(
            p == PROVENANCE_DEFAULT or p.startswith(PROVENANCE_JUDGE) for p in self.provenance
        )

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "severity": self.severity.value,
            "rationale": self.rationale,
            "provenance": list(self.provenance),
            "elapsed": self.elapsed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Decision":
        return cls(
            verdict=Verdict(d["verdict"]),
            severity=Severity(d.get("severity", "LOW")),
            rationale=d.get("rationale", ""),
            provenance=tuple(d.get("provenance", ())),
            elapsed=float(d.get("elapsed", 0.0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
