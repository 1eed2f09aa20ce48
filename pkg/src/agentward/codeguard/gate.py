"""Execution gate for native scripts."""

from __future__ import annotations

from ..verdicts import Decision, Severity, Verdict
from .analysis import analyze_script


def gate_execution(source: str, context: str = "") -> Decision:
    """BLOCK on a sensitive-source-to-external-sink flow or a hard attack token.

    Source-only and sink-only scripts pass: reading ~/.ssh to display it,
    exec of a local plugin, a self-targeted port scan, a crontab backup entry.
    """
    analysis = analyze_script(source)
    if analysis.flows:
        pairs = "; ".join(f"{f.source} -> {f.sink} via {f.via}" for f in analysis.flows)
        return Decision(
            verdict=Verdict.BLOCK,
            severity=Severity.HIGH,
            rationale=f"sensitive data reaches an external sink: {pairs}",
            provenance=("code_flow",),
        )
    if analysis.tokens:
        return Decision(
            verdict=Verdict.BLOCK,
            severity=Severity.HIGH,
            rationale="attack pattern with exploit context: " + ", ".join(analysis.tokens),
            provenance=("attack_token",),
        )
    return Decision(
        verdict=Verdict.PASS,
        severity=Severity.LOW,
        rationale="no sensitive flow and no attack token",
        provenance=("code_gate",),
    )
