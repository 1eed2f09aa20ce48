"""Aggregate per-case outcomes into a metrics report.

Score aggregation is a fold over commutative counters, so case order never
changes an accuracy, detection, or false-positive figure; runtime statistics
are deterministic for a given suite. All published percentages round half up
at one decimal; integer tables use the same rule at zero decimals.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

from ..verdicts import Verdict


def round_half_up(value: float, ndigits: int = 1) -> float:
    """School rounding: halves move away from zero, not to the even digit."""
    quantum = Decimal(1).scaleb(-ndigits)
    return float(Decimal(str(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def _pct(part: int, whole: int) -> float:
    if whole <= 0:
        return 0.0
    return part * 100.0 / whole


@dataclass(frozen=True)
class CaseOutcome:
    """One evaluated case: what the engine decided versus the label."""

    case_id: str
    scenario: str
    category: str
    truth: Verdict
    decided: Verdict
    provenance: tuple[str, ...] = ()
    elapsed: float = 0.0

    @property
    def correct(self) -> bool:
        return self.decided is self.truth


@dataclass(frozen=True)
class ScenarioStats:
    scenario: str
    total: int
    correct: int

    @property
    def accuracy_pct(self) -> float:
        return round_half_up(_pct(self.correct, self.total), 1)


@dataclass(frozen=True)
class PatternStats:
    """Decided-verdict counts over the positive cases of one pattern.

    Detection counts any non-PASS verdict; the block rate counts outright
    blocks only.
    """

    pattern: str
    block: int
    review: int
    passed: int

    @property
    def total(self) -> int:
        return self.block + self.review + self.passed

    @property
    def detect_pct(self) -> float:
        return round_half_up(_pct(self.block + self.review, self.total), 1)

    @property
    def block_pct(self) -> float:
        return round_half_up(_pct(self.block, self.total), 1)


@dataclass(frozen=True)
class RuntimeStats:
    total_s: float
    mean_s: float
    max_s: float


@dataclass(frozen=True)
class MetricsReport:
    domain: str
    total: int
    correct: int
    scenarios: tuple[ScenarioStats, ...]
    patterns: tuple[PatternStats, ...]
    false_positives: int
    negatives: int
    strict_fp: bool
    runtime: RuntimeStats

    @property
    def accuracy_pct(self) -> float:
        return round_half_up(_pct(self.correct, self.total), 1)

    @property
    def fp_rate_pct(self) -> float:
        return round_half_up(_pct(self.false_positives, self.negatives), 1)

    @classmethod
    def empty(cls) -> "MetricsReport":
        return cls(
            domain="",
            total=0,
            correct=0,
            scenarios=(),
            patterns=(),
            false_positives=0,
            negatives=0,
            strict_fp=False,
            runtime=RuntimeStats(0.0, 0.0, 0.0),
        )


def runtime_from_elapsed(elapsed: Sequence[float]) -> RuntimeStats:
    if not elapsed:
        return RuntimeStats(0.0, 0.0, 0.0)
    total = sum(elapsed)
    return RuntimeStats(total_s=total, mean_s=total / len(elapsed), max_s=max(elapsed))


def metrics_from_outcomes(
    domain: str,
    outcomes: Iterable[CaseOutcome],
    *,
    strict_fp: bool = False,
) -> MetricsReport:
    """Fold outcomes into a report.

    A false positive is a PASS-labeled case the engine flagged; by default
    both spurious reviews and spurious blocks count, under ``strict_fp``
    only blocks do.
    """
    outcomes = list(outcomes)

    by_scenario: dict[str, list[CaseOutcome]] = {}
    for outcome in outcomes:
        by_scenario.setdefault(outcome.scenario, []).append(outcome)
    scenarios = tuple(
        ScenarioStats(
            scenario=name,
            total=len(group),
            correct=sum(1 for o in group if o.correct),
        )
        for name, group in sorted(by_scenario.items())
    )

    positives: dict[str, list[CaseOutcome]] = {}
    for outcome in outcomes:
        if outcome.truth is not Verdict.PASS:
            positives.setdefault(outcome.scenario, []).append(outcome)
    patterns = tuple(
        PatternStats(
            pattern=name,
            block=sum(1 for o in group if o.decided is Verdict.BLOCK),
            review=sum(1 for o in group if o.decided is Verdict.REVIEW),
            passed=sum(1 for o in group if o.decided is Verdict.PASS),
        )
        for name, group in sorted(positives.items())
    )

    negatives = [o for o in outcomes if o.truth is Verdict.PASS]
    if strict_fp:
        false_positives = sum(1 for o in negatives if o.decided is Verdict.BLOCK)
    else:
        false_positives = sum(1 for o in negatives if o.decided is not Verdict.PASS)

    return MetricsReport(
        domain=domain,
        total=len(outcomes),
        correct=sum(1 for o in outcomes if o.correct),
        scenarios=scenarios,
        patterns=patterns,
        false_positives=false_positives,
        negatives=len(negatives),
        strict_fp=strict_fp,
        runtime=runtime_from_elapsed([o.elapsed for o in outcomes]),
    )
