"""Drive labeled suites through an engine binding and score the outcomes.

A binding pairs a domain name with a callable that turns one case into a
Decision. Cases are independent, so they may run on a thread pool; outcomes
are collected in input order and aggregation itself is order-free.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from time import perf_counter
from typing import Callable, Iterable, Sequence

from ..codeguard import OPERATORS, MutationOperator, SeedCase, gate_execution, mutate
from ..config import Config
from ..decision.engine import decide
from ..decision.judge import Judge
from ..decision.rules import Rule
from ..errors import DomainMismatchError
from ..scanner import DetectorConfig, package_from_files, scan_package
from ..verdicts import Decision, Verdict
from .metrics import CaseOutcome, MetricsReport, metrics_from_outcomes
from .suites import SuiteCase, SuiteFile


@dataclass(frozen=True)
class EngineBinding:
    domain: str
    decide_case: Callable[[SuiteCase], Decision]
    name: str = ""


def workspace_binding(
    ruleset: Sequence[Rule],
    judge: Judge | None = None,
    config: Config | None = None,
) -> EngineBinding:
    """Score workspace actions through the rule-then-judge decision path."""

    def decide_case(case: SuiteCase) -> Decision:
        return decide(case.input, None, ruleset, judge, config)

    return EngineBinding(domain="workspace", decide_case=decide_case, name="workspace")


def skills_binding(
    config: DetectorConfig | None = None,
    policy: dict | None = None,
) -> EngineBinding:
    """Score embedded skill packages through the static scanner."""

    def decide_case(case: SuiteCase) -> Decision:
        report = scan_package(package_from_files(case.package, dict(case.files)), config, policy)
        tags = tuple(sorted({f"pattern:{f.pattern.value}" for f in report.findings}))
        return Decision(
            verdict=report.verdict,
            severity=report.severity,
            rationale=f"{len(report.findings)} finding(s) in package {case.package}",
            provenance=("scanner",) + tags,
        )

    return EngineBinding(domain="skills", decide_case=decide_case, name="skills")


def code_binding() -> EngineBinding:
    """Score raw script sources through the pre-execution gate."""

    def decide_case(case: SuiteCase) -> Decision:
        return gate_execution(case.source)

    return EngineBinding(domain="code", decide_case=decide_case, name="code")


def _timed_outcome(
    case_id: str,
    scenario: str,
    category: str,
    truth: Verdict,
    run: Callable[[], Decision],
) -> CaseOutcome:
    start = perf_counter()
    decision = run()
    elapsed = perf_counter() - start
    return CaseOutcome(
        case_id=case_id,
        scenario=scenario,
        category=category,
        truth=truth,
        decided=decision.verdict,
        provenance=decision.provenance,
        elapsed=elapsed,
    )


def evaluate_suite(
    suite: SuiteFile,
    binding: EngineBinding,
    *,
    workers: int = 0,
) -> tuple[CaseOutcome, ...]:
    """Run every case; outcomes come back in suite order regardless of pool."""
    if suite.domain != binding.domain:
        raise DomainMismatchError(binding.domain, suite.domain)

    def one(case: SuiteCase) -> CaseOutcome:
        return _timed_outcome(
            case.id, case.scenario, case.category, case.truth,
            lambda: binding.decide_case(case),
        )

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return tuple(pool.map(one, suite.cases))
    return tuple(one(case) for case in suite.cases)


def run_suite(
    suite: SuiteFile,
    binding: EngineBinding,
    *,
    strict_fp: bool = False,
    workers: int = 0,
) -> MetricsReport:
    outcomes = evaluate_suite(suite, binding, workers=workers)
    return metrics_from_outcomes(suite.domain, outcomes, strict_fp=strict_fp)


@dataclass(frozen=True)
class InvarianceViolation:
    """A mutant whose verdict diverged from its seed's decided verdict."""

    seed_id: str
    mutant_id: str
    operator: str
    seed_verdict: Verdict
    mutant_verdict: Verdict


def run_mutation_campaign(
    seeds: Iterable[SeedCase],
    operators: Sequence[MutationOperator | str] = OPERATORS,
    n: int = 100,
    *,
    engine: Callable[[str], Decision] | None = None,
    strict_fp: bool = False,
) -> tuple[MetricsReport, tuple[InvarianceViolation, ...]]:
    """Evaluate each seed plus ``n`` semantics-preserving mutants of it.

    Every mutant inherits its seed's label, and additionally must agree with
    the verdict the engine gave the unmutated seed; disagreements come back
    as invariance violations.
    """
    if n < 0:
        raise ValueError("mutant count must be non-negative")
    gate = engine or gate_execution
    ops = list(operators) or list(OPERATORS)
    op_ids = [op if isinstance(op, str) else op.id for op in ops]

    outcomes: list[CaseOutcome] = []
    violations: list[InvarianceViolation] = []
    for seed in seeds:
        truth = Verdict(seed.label)
        base = _timed_outcome(seed.id, seed.id, "seed", truth, lambda: gate(seed.source))
        outcomes.append(base)
        for j in range(n):
            operator = ops[j % len(ops)]
            mutated = mutate(seed.source, operator, seed=j)
            mutant_id = f"{seed.id}-m{j:03d}"
            outcome = _timed_outcome(
                mutant_id, seed.id, "mutant", truth, lambda m=mutated: gate(m)
            )
            outcomes.append(outcome)
            if outcome.decided is not base.decided:
                violations.append(
                    InvarianceViolation(
                        seed_id=seed.id,
                        mutant_id=mutant_id,
                        operator=op_ids[j % len(op_ids)],
                        seed_verdict=base.decided,
                        mutant_verdict=outcome.decided,
                    )
                )

    report = metrics_from_outcomes("code", outcomes, strict_fp=strict_fp)
    return report, tuple(violations)
