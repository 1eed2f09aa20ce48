"""Domain types for the counterpart synthesis pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from ..skills import DIMENSIONS, RUBRIC, SkillDocument
from ..verdicts import Verdict
from .vocab import RISK_CATEGORIES

CATEGORY_DIRECT = "A"
CATEGORY_NATURAL = "B"
CATEGORY_ADVERSARIAL = "C"
CATEGORY_BENIGN = "D"

CATEGORIES = (CATEGORY_DIRECT, CATEGORY_NATURAL, CATEGORY_ADVERSARIAL, CATEGORY_BENIGN)

CAUSE_SPEC_GAP = "specification gap"
CAUSE_AMBIGUITY = "ambiguity"
CAUSE_REASONING = "reasoning error"

CAUSE_CLASSES = (CAUSE_SPEC_GAP, CAUSE_AMBIGUITY, CAUSE_REASONING)

DEFAULT_EPSILON = 0.005
DEFAULT_K_CONSECUTIVE = 2
DEFAULT_MAX_ITERATIONS = 10
DEFAULT_COUNTS = {"A": 3, "B": 3, "C": 3, "D": 4}


@dataclass(frozen=True)
class RiskyOperation:
    """One gated operation a skill can perform."""

    action: str
    category: str
    dimensions: dict[str, str]
    keywords: tuple[str, ...] = ()
    sensitive_terms: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.category not in RISK_CATEGORIES:
            raise ValueError(f"unknown risk category {self.category!r}")
        for dim in DIMENSIONS:
            answer = self.dimensions.get(dim)
            if answer not in RUBRIC[dim]:
                raise ValueError(f"operation {self.action!r}: bad {dim} answer {answer!r}")


@dataclass(frozen=True)
class ThreatModel:
    skill: str
    operations: tuple[RiskyOperation, ...] = ()

    def to_dict(self) -> dict:
        return {
            "skill": self.skill,
            "operations": [
                {
                    "action": op.action,
                    "category": op.category,
                    "dimensions": dict(op.dimensions),
                    "keywords": list(op.keywords),
                    "sensitive_terms": list(op.sensitive_terms),
                }
                for op in self.operations
            ],
        }


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # not a pytest class, despite the name

    id: str
    input: str
    category: str
    truth: Verdict
    note: str = ""

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise ValueError(f"case {self.id}: unknown category {self.category!r}")
        # true negatives may at worst warrant a review, never a block
        if self.category == CATEGORY_BENIGN and self.truth is Verdict.BLOCK:
            raise ValueError(f"case {self.id}: benign category cannot carry BLOCK")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "input": self.input,
            "category": self.category,
            "truth": self.truth.value,
            "note": self.note,
        }


@dataclass(frozen=True)
class CaseRow:
    """One evaluated case: what the engine decided and why."""

    case: TestCase
    decided: Verdict
    provenance: tuple[str, ...] = ()

    @property
    def correct(self) -> bool:
        return self.decided is self.case.truth

    def to_dict(self) -> dict:
        return {
            "case": self.case.to_dict(),
            "decided": self.decided.value,
            "provenance": list(self.provenance),
        }


_VERDICT_ORDER = ("PASS", "REVIEW", "BLOCK")


@dataclass(frozen=True)
class EvalReport:
    spec: SkillDocument
    rows: tuple[CaseRow, ...]
    per_category: dict[str, float]
    overall: float
    fp: tuple[str, ...]
    fn: tuple[str, ...]
    confusion: dict[str, dict[str, int]]

    @property
    def total(self) -> int:
        return len(self.rows)

    def failures(self) -> tuple[CaseRow, ...]:
        return tuple(r for r in self.rows if not r.correct)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.name,
            "total": self.total,
            "per_category": {k: self.per_category[k] for k in sorted(self.per_category)},
            "overall": self.overall,
            "fp": list(self.fp),
            "fn": list(self.fn),
            "confusion": {
                truth: {d: self.confusion[truth][d] for d in _VERDICT_ORDER}
                for truth in _VERDICT_ORDER
            },
            "rows": [r.to_dict() for r in self.rows],
        }


@dataclass(frozen=True)
class SpecDelta:
    """One concrete edit to a counterpart document.

    kind: narrow (add tokens to a gate), direction (tag a gate destructive),
    retoken (regex gate to token gate), allow (append a pass qualifier),
    add_rule (append a new gate).
    """

    kind: str
    target: str | None = None
    tokens: tuple[str, ...] = ()
    verdict: str = ""
    via: tuple[str, ...] = ()
    direction: str = ""

    def describe(self) -> str:
        bits = [self.kind]
        if self.target:
            bits.append(f"target={self.target}")
        if self.tokens:
            bits.append("tokens=" + "+".join(self.tokens))
        if self.verdict:
            bits.append(f"verdict={self.verdict}")
        if self.direction:
            bits.append(f"direction={self.direction}")
        return " ".join(bits)


@dataclass(frozen=True)
class RootCause:
    cases: tuple[str, ...]
    cause_class: str
    note: str
    delta: SpecDelta | None = None

    def __post_init__(self) -> None:
        if self.cause_class not in CAUSE_CLASSES:
            raise ValueError(f"unknown cause class {self.cause_class!r}")

    @property
    def unexplained(self) -> bool:
        return self.delta is None

    def to_dict(self) -> dict:
        return {
            "cases": list(self.cases),
            "class": self.cause_class,
            "note": self.note,
            "delta": self.delta.describe() if self.delta else "unexplained",
        }


@dataclass
class FactoryConfig:
    epsilon: float = DEFAULT_EPSILON
    k_consecutive: int = DEFAULT_K_CONSECUTIVE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    counts: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_COUNTS))
    seed: int = 0
    judge: object | None = None
    generator: object | None = None
    registry: object | None = None
    checkpoint: object | None = None  # callable(spec, report) -> bool; None means off
    artifact_dir: Path | None = None


@dataclass(frozen=True)
class SynthesisResult:
    """Counterpart plus the evidence it converged.

    Iterates as (counterpart, tests, report) so callers can unpack the triple
    directly.
    """

    counterpart: SkillDocument
    tests: tuple[TestCase, ...]
    report: EvalReport
    model: ThreatModel
    iterations: int
    converged: bool
    registered: bool
    registry: object
    warning: str | None = None
    train_history: tuple[float, ...] = ()
    holdout_history: tuple[float, ...] = ()
    log: tuple[dict, ...] = ()

    def __iter__(self):
        return iter((self.counterpart, self.tests, self.report))


def clone_config(config: FactoryConfig) -> FactoryConfig:
    return replace(config, counts=dict(config.counts))
