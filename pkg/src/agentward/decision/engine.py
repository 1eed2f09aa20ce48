"""Hybrid decision routing: rules first, judge for the remainder.

The rule layer owns clear-cut cases and its HARD_BLOCK verdicts are final.
Everything it declines goes to the judge; a confident judge answer stands,
anything else (low confidence, missing judge, transport failure, malformed
output) collapses to REVIEW so ambiguity never silently passes.
"""

from __future__ import annotations

import time

from ..config import Config
from ..errors import InvalidConfigError
from ..verdicts import Decision, Severity, Verdict
from .judge import Judge, JudgeRequest
from .rules import DecisionContext, Rule, evaluate_rules

_JUDGE_SEVERITY = {
    Verdict.PASS: Severity.LOW,
    Verdict.REVIEW: Severity.MEDIUM,
    Verdict.BLOCK: Severity.HIGH,
}


def _default_review(rationale: str, elapsed: float) -> Decision:
    return Decision(
        verdict=Verdict.REVIEW,
        severity=Severity.LOW,
        rationale=rationale,
        provenance=("default",),
        elapsed=elapsed,
    )


def decide(
    action: str,
    context: DecisionContext | None,
    ruleset: list[Rule],
    judge: Judge | None,
    config: Config | None = None,
) -> Decision:
    """Route one action through the rule layer and, if needed, the judge."""
    config = config or Config()
    start = time.perf_counter()

    ruled = evaluate_rules(
        action, context, ruleset, directionality=config.directionality
    )
    if ruled is not None:
        return Decision(
            verdict=ruled.verdict,
            severity=ruled.severity,
            rationale=ruled.rationale,
            provenance=ruled.provenance,
            elapsed=time.perf_counter() - start,
        )

    if judge is None:
        return _default_review(
            "no rule matched and no judge is registered",
            time.perf_counter() - start,
        )

    request = JudgeRequest(
        action=action,
        context_excerpt=context.excerpt if context else "",
        policy_excerpt="; ".join(r.id for r in ruleset[:20]),
    )
    try:
        response = judge.assess(request)
    except Exception as exc:
        return _default_review(
            f"judge unavailable ({exc}); defaulting to review",
            time.perf_counter() - start,
        )

    if response.confidence < config.judge_confidence:
        return _default_review(
            f"judge confidence {response.confidence:.2f} below "
            f"threshold {config.judge_confidence:.2f}",
            time.perf_counter() - start,
        )

    return Decision(
        verdict=response.verdict,
        severity=_JUDGE_SEVERITY[response.verdict],
        rationale=response.rationale or "judge decision",
        provenance=(f"judge:{getattr(judge, 'name', 'judge')}",),
        elapsed=time.perf_counter() - start,
    )


def bulk_send_policy(
    recipients: int,
    known_contacts: float,
    recurring: bool,
    justification_present: bool,
    config: Config | None = None,
) -> Verdict:
    """One-dimensional outbound-volume table.

    At or above the hard ceiling nothing unlocks a send, justification
    included. Between the floor and the ceiling the answer is always REVIEW,
    so mid-size legitimate sends are never hard-stopped. Below the floor a
    send passes unless it recurs toward mostly unknown recipients.
    """
    config = config or Config()
    if config.review_floor >= config.hard_ceiling:
        raise InvalidConfigError("review_floor must stay below hard_ceiling")
    if recipients < 0:
        raise InvalidConfigError("recipient count cannot be negative")
    if not 0.0 <= known_contacts <= 1.0:
        raise InvalidConfigError("known-contact fraction must lie in [0, 1]")

    if recipients >= config.hard_ceiling:
        return Verdict.BLOCK
    if recipients >= config.review_floor:
        return Verdict.REVIEW
    if recurring and known_contacts < config.known_contact_floor:
        return Verdict.REVIEW
    return Verdict.PASS
