"""Render a metrics report to disk, and read the CSV form back.

Two formats ship: an aligned text table for terminals and a comma-separated
form for spreadsheets. Both use the same column order and the same one-decimal
half-up rounding. The CSV form round-trips: counts are stored exactly and the
percentage columns are derived, so emit, parse, emit reaches a byte fixed
point on the first pass. An empty report produces a header-only file.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from ..errors import IoFailureError
from .metrics import (
    MetricsReport,
    PatternStats,
    RuntimeStats,
    ScenarioStats,
    round_half_up,
)

FORMATS = ("table", "csv")

CSV_COLUMNS = (
    "section",
    "key",
    "total",
    "correct",
    "accuracy_pct",
    "block",
    "review",
    "passed",
    "detect_pct",
    "block_pct",
    "value",
)

TOTAL_KEY = "TOTAL"


def _fmt_pct(value: float) -> str:
    return f"{round_half_up(value, 1):.1f}"


def _fmt_seconds(value: float) -> str:
    return f"{value:.6f}"


def _csv_rows(report: MetricsReport) -> list[dict[str, str]]:
    rows: list[dict[str, str]] = []
    if not report.domain:
        return rows

    def row(**kwargs: str) -> dict[str, str]:
        filled = {column: "" for column in CSV_COLUMNS}
        filled.update(kwargs)
        return filled

    rows.append(row(section="meta", key="domain", value=report.domain))
    rows.append(row(section="meta", key="strict_fp", value="true" if report.strict_fp else "false"))
    for stats in report.scenarios:
        rows.append(
            row(
                section="scenario",
                key=stats.scenario,
                total=str(stats.total),
                correct=str(stats.correct),
                accuracy_pct=_fmt_pct(stats.accuracy_pct),
            )
        )
    rows.append(
        row(
            section="scenario",
            key=TOTAL_KEY,
            total=str(report.total),
            correct=str(report.correct),
            accuracy_pct=_fmt_pct(report.accuracy_pct),
        )
    )
    for stats in report.patterns:
        rows.append(
            row(
                section="pattern",
                key=stats.pattern,
                total=str(stats.total),
                block=str(stats.block),
                review=str(stats.review),
                passed=str(stats.passed),
                detect_pct=_fmt_pct(stats.detect_pct),
                block_pct=_fmt_pct(stats.block_pct),
            )
        )
    rows.append(row(section="summary", key="false_positives", value=str(report.false_positives)))
    rows.append(row(section="summary", key="negatives", value=str(report.negatives)))
    rows.append(row(section="summary", key="fp_rate_pct", value=_fmt_pct(report.fp_rate_pct)))
    rows.append(row(section="summary", key="runtime_total_s", value=_fmt_seconds(report.runtime.total_s)))
    rows.append(row(section="summary", key="runtime_mean_s", value=_fmt_seconds(report.runtime.mean_s)))
    rows.append(row(section="summary", key="runtime_max_s", value=_fmt_seconds(report.runtime.max_s)))
    return rows


def render_csv(report: MetricsReport) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in _csv_rows(report):
        writer.writerow(row)
    return buffer.getvalue()


def _aligned(rows: list[tuple[str, ...]], right_from: int = 1) -> list[str]:
    if not rows:
        return []
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for r in rows:
        cells = [
            r[i].rjust(widths[i]) if i >= right_from else r[i].ljust(widths[i])
            for i in range(len(r))
        ]
        lines.append("  ".join(cells).rstrip())
    return lines


def render_table(report: MetricsReport) -> str:
    if not report.domain:
        return "metrics report: empty\n"

    lines = [
        f"domain: {report.domain}    cases: {report.total}    "
        f"correct: {report.correct}    accuracy: {_fmt_pct(report.accuracy_pct)}%",
        "",
    ]

    scenario_rows: list[tuple[str, ...]] = [("scenario", "cases", "correct", "accuracy%")]
    for stats in report.scenarios:
        scenario_rows.append(
            (stats.scenario, str(stats.total), str(stats.correct), _fmt_pct(stats.accuracy_pct))
        )
    scenario_rows.append(
        (TOTAL_KEY, str(report.total), str(report.correct), _fmt_pct(report.accuracy_pct))
    )
    lines.extend(_aligned(scenario_rows))

    if report.patterns:
        lines.append("")
        pattern_rows: list[tuple[str, ...]] = [
            ("pattern", "block", "review", "pass", "detect%", "block%")
        ]
        for stats in report.patterns:
            pattern_rows.append(
                (
                    stats.pattern,
                    str(stats.block),
                    str(stats.review),
                    str(stats.passed),
                    _fmt_pct(stats.detect_pct),
                    _fmt_pct(stats.block_pct),
                )
            )
        lines.extend(_aligned(pattern_rows))

    counted = "blocks only" if report.strict_fp else "review and block"
    lines.extend(
        [
            "",
            f"false positives: {report.false_positives} / {report.negatives} negatives "
            f"({_fmt_pct(report.fp_rate_pct)}%), counting {counted}",
            f"runtime: total {_fmt_seconds(report.runtime.total_s)}s, "
            f"mean {_fmt_seconds(report.runtime.mean_s)}s, "
            f"max {_fmt_seconds(report.runtime.max_s)}s",
        ]
    )
    return "\n".join(lines) + "\n"


def emit_report(report: MetricsReport, path: str | Path, fmt: str = "table") -> Path:
    """Write the report to ``path`` in the named format."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")
    text = render_csv(report) if fmt == "csv" else render_table(report)
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailureError(f"cannot write report to {path}: {exc}") from exc
    return path


def _to_int(value: str, context: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise IoFailureError(f"report field {context} is not an integer: {value!r}") from None


def _to_float(value: str, context: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise IoFailureError(f"report field {context} is not a number: {value!r}") from None


def parse_report(path: str | Path) -> MetricsReport:
    """Reconstruct a report from its CSV form (counts are authoritative)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailureError(f"cannot read report {path}: {exc}") from exc

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise IoFailureError(f"report {path} is empty, not even a header") from None
    if tuple(header) != CSV_COLUMNS:
        raise IoFailureError(f"report {path} has an unexpected header: {header!r}")

    domain = ""
    strict_fp = False
    total = correct = 0
    scenarios: list[ScenarioStats] = []
    patterns: list[PatternStats] = []
    summary: dict[str, str] = {}

    columns = {name: i for i, name in enumerate(CSV_COLUMNS)}
    for row in reader:
        if not row:
            continue
        if len(row) != len(CSV_COLUMNS):
            raise IoFailureError(f"report {path} row has {len(row)} cells: {row!r}")
        section = row[columns["section"]]
        key = row[columns["key"]]
        if section == "meta":
            if key == "domain":
                domain = row[columns["value"]]
            elif key == "strict_fp":
                strict_fp = row[columns["value"]] == "true"
            else:
                raise IoFailureError(f"report {path}: unknown meta key {key!r}")
        elif section == "scenario":
            row_total = _to_int(row[columns["total"]], f"scenario {key} total")
            row_correct = _to_int(row[columns["correct"]], f"scenario {key} correct")
            if key == TOTAL_KEY:
                total, correct = row_total, row_correct
            else:
                scenarios.append(ScenarioStats(scenario=key, total=row_total, correct=row_correct))
        elif section == "pattern":
            patterns.append(
                PatternStats(
                    pattern=key,
                    block=_to_int(row[columns["block"]], f"pattern {key} block"),
                    review=_to_int(row[columns["review"]], f"pattern {key} review"),
                    passed=_to_int(row[columns["passed"]], f"pattern {key} passed"),
                )
            )
        elif section == "summary":
            summary[key] = row[columns["value"]]
        else:
            raise IoFailureError(f"report {path}: unknown section {section!r}")

    if not domain:
        return MetricsReport.empty()

    runtime = RuntimeStats(
        total_s=_to_float(summary.get("runtime_total_s", "0"), "runtime_total_s"),
        mean_s=_to_float(summary.get("runtime_mean_s", "0"), "runtime_mean_s"),
        max_s=_to_float(summary.get("runtime_max_s", "0"), "runtime_max_s"),
    )
    return MetricsReport(
        domain=domain,
        total=total,
        correct=correct,
        scenarios=tuple(scenarios),
        patterns=tuple(patterns),
        false_positives=_to_int(summary.get("false_positives", "0"), "false_positives"),
        negatives=_to_int(summary.get("negatives", "0"), "negatives"),
        strict_fp=strict_fp,
        runtime=runtime,
    )
