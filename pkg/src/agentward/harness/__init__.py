"""Evaluation harness: labeled suites, engine bindings, metrics, reports."""

from .metrics import (
    CaseOutcome,
    MetricsReport,
    PatternStats,
    RuntimeStats,
    ScenarioStats,
    metrics_from_outcomes,
    round_half_up,
)
from .reporting import emit_report, parse_report, render_csv, render_table
from .runner import (
    EngineBinding,
    InvarianceViolation,
    code_binding,
    evaluate_suite,
    run_mutation_campaign,
    run_suite,
    skills_binding,
    workspace_binding,
)
from .suites import DOMAINS, SuiteCase, SuiteFile, dump_suite, load_suite

__all__ = [
    "CaseOutcome",
    "DOMAINS",
    "EngineBinding",
    "InvarianceViolation",
    "MetricsReport",
    "PatternStats",
    "RuntimeStats",
    "ScenarioStats",
    "SuiteCase",
    "SuiteFile",
    "code_binding",
    "dump_suite",
    "emit_report",
    "evaluate_suite",
    "load_suite",
    "metrics_from_outcomes",
    "parse_report",
    "render_csv",
    "render_table",
    "round_half_up",
    "run_mutation_campaign",
    "run_suite",
    "skills_binding",
    "workspace_binding",
]
