"""Scan reports and the findings-to-verdict policy."""

from __future__ import annotations

from dataclasses import dataclass

from ..verdicts import Severity, Verdict
from .detectors import DEFAULT_CONFIG, DETECTORS, DetectorConfig, ThreatPattern
from .package import SkillPackage

#: Default pattern severities. Exfiltration-class and takeover-class patterns
#: block outright; everything else is escalated for human review; unpinned
#: dependencies alone never block.
DEFAULT_SEVERITY: dict[ThreatPattern, Severity] = {
    ThreatPattern.REMOTE_CODE_EXECUTION: Severity.HIGH,
    ThreatPattern.CREDENTIAL_THEFT: Severity.HIGH,
    ThreatPattern.DATA_EXFILTRATION: Severity.HIGH,
    ThreatPattern.PRIVILEGE_ESCALATION: Severity.HIGH,
    ThreatPattern.BEHAVIOR_MANIPULATION: Severity.MEDIUM,
    ThreatPattern.EXTERNAL_TRANSMISSION: Severity.MEDIUM,
    ThreatPattern.INSTRUCTION_OVERRIDE: Severity.MEDIUM,
    ThreatPattern.CONTEXT_LEAKAGE: Severity.MEDIUM,
    ThreatPattern.CODE_OBFUSCATION: Severity.MEDIUM,
    ThreatPattern.HARDCODED_TOKENS: Severity.MEDIUM,
    ThreatPattern.FILE_SYSTEM_SCAN: Severity.MEDIUM,
    ThreatPattern.HIDDEN_INSTRUCTIONS: Severity.MEDIUM,
    ThreatPattern.UNPINNED_DEPENDENCIES: Severity.LOW,
}


@dataclass(frozen=True)
class Finding:
    pattern: ThreatPattern
    file: str
    line: int
    evidence: str
    severity: Severity

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern.value,
            "file": self.file,
            "line": self.line,
            "evidence": self.evidence,
            "severity": self.severity.value,
        }


@dataclass(frozen=True)
class ScanReport:
    package: str
    findings: tuple[Finding, ...]
    verdict: Verdict
    severity: Severity
    counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "package": self.package,
            "verdict": self.verdict.value,
            "severity": self.severity.value,
            "counts": dict(self.counts),
            "findings": [f.to_dict() for f in self.findings],
        }

    def summary(self) -> str:
        lines = [f"{self.package}: {self.verdict.value} ({self.severity.value})"]
        for f in self.findings:
            lines.append(f"  {f.pattern.value} {f.file}:{f.line} {f.evidence}")
        return "\n".join(lines)


def verdict_from_findings(
    findings, policy: dict[ThreatPattern, Severity] | None = None
) -> tuple[Verdict, Severity]:
    """PASS iff no findings; any HIGH or CRITICAL blocks; otherwise review."""
    policy = policy or DEFAULT_SEVERITY
    if not findings:
        return Verdict.PASS, Severity.LOW
    worst = max(
        (policy.get(f.pattern, f.severity) for f in findings), key=lambda s: s.rank
    )
    if worst.rank >= Severity.HIGH.rank:
        return Verdict.BLOCK, worst
    return Verdict.REVIEW, worst


def scan_package(
    pkg: SkillPackage,
    config: DetectorConfig | None = None,
    policy: dict[ThreatPattern, Severity] | None = None,
) -> ScanReport:
    """Run all thirteen detectors over instructions and auxiliary files."""
    cfg = config or DEFAULT_CONFIG
    policy = policy or DEFAULT_SEVERITY
    findings = []
    for pattern, detector in DETECTORS.items():
        for hit in detector(pkg, cfg):
            findings.append(
                Finding(
                    pattern=pattern,
                    file=hit.file,
                    line=hit.line,
                    evidence=hit.evidence,
                    severity=policy.get(pattern, Severity.MEDIUM),
                )
            )
    findings.sort(key=lambda f: (-f.severity.rank, f.pattern.value, f.file, f.line))
    verdict, severity = verdict_from_findings(findings, policy)
    counts: dict[str, int] = {}
    for f in findings:
        counts[f.pattern.value] = counts.get(f.pattern.value, 0) + 1
    return ScanReport(
        package=pkg.name,
        findings=tuple(findings),
        verdict=verdict,
        severity=severity,
        counts=counts,
    )
