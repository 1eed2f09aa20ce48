"""Evaluation suite files: typed cases, a JSONL loader, and a stable writer.

A suite file holds one case per line. Every record names its domain, and a
file must stay single-domain so a run binds to exactly one engine. Labels are
three-way (PASS / REVIEW / BLOCK); a skills case flagged malicious may never
carry a PASS label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from ..errors import SuiteParseError
from ..verdicts import Verdict

DOMAINS = ("workspace", "skills", "code")

# workspace provenance tags: direct tool calls, paraphrases, obfuscated
# variants, and benign traffic
CATEGORIES = ("A", "B", "C", "D")


@dataclass(frozen=True)
class SuiteCase:
    """One labeled evaluation input.

    Which payload field is populated depends on the domain: ``input`` for
    workspace actions, ``package``/``files`` for skill packages, ``source``
    for scripts headed to an interpreter.
    """

    id: str
    domain: str
    scenario: str
    truth: Verdict
    category: str = ""
    input: str = ""
    package: str = ""
    files: Mapping[str, str] = field(default_factory=dict)
    source: str = ""
    malicious: bool = False
    note: str = ""

    def to_record(self) -> dict:
        record: dict = {
            "id": self.id,
            "domain": self.domain,
            "scenario": self.scenario,
            "truth": self.truth.value,
        }
        if self.category:
            record["category"] = self.category
        if self.input:
            record["input"] = self.input
        if self.package:
            record["package"] = self.package
        if self.files:
            record["files"] = dict(self.files)
        if self.source:
            record["source"] = self.source
        if self.malicious:
            record["malicious"] = True
        if self.note:
            record["note"] = self.note
        return record


@dataclass(frozen=True)
class SuiteFile:
    domain: str
    cases: tuple[SuiteCase, ...]

    def __len__(self) -> int:
        return len(self.cases)


def _fail(path: Path, lineno: int, message: str) -> SuiteParseError:
    return SuiteParseError(f"{path.name}:{lineno}: {message}")


def _require_str(record: dict, key: str, path: Path, lineno: int) -> str:
    value = record.get(key)
    if not isinstance(value, str) or not value.strip():
        raise _fail(path, lineno, f"field {key!r} must be a non-empty string")
    return value


def case_from_record(record: dict, path: Path, lineno: int) -> SuiteCase:
    if not isinstance(record, dict):
        raise _fail(path, lineno, "record must be a JSON object")

    case_id = _require_str(record, "id", path, lineno)
    domain = _require_str(record, "domain", path, lineno)
    if domain not in DOMAINS:
        raise _fail(path, lineno, f"unknown domain {domain!r}")
    scenario = _require_str(record, "scenario", path, lineno)

    raw_truth = _require_str(record, "truth", path, lineno)
    try:
        truth = Verdict(raw_truth)
    except ValueError:
        raise _fail(path, lineno, f"unknown truth label {raw_truth!r}") from None

    category = record.get("category", "")
    if category and category not in CATEGORIES:
        raise _fail(path, lineno, f"unknown category {category!r}")

    note = record.get("note", "")
    malicious = bool(record.get("malicious", False))

    if domain == "workspace":
        action = _require_str(record, "input", path, lineno)
        return SuiteCase(
            id=case_id,
            domain=domain,
            scenario=scenario,
            truth=truth,
            category=category,
            input=action,
            note=note,
        )

    if domain == "skills":
        package = _require_str(record, "package", path, lineno)
        files = record.get("files")
        if (
            not isinstance(files, dict)
            or not files
            or not all(isinstance(k, str) and isinstance(v, str) for k, v in files.items())
        ):
            raise _fail(path, lineno, "field 'files' must be a non-empty name-to-text map")
        # a confirmed-malicious package must never be labeled safe
        if malicious and truth is Verdict.PASS:
            raise _fail(path, lineno, "malicious skills case cannot carry a PASS label")
        return SuiteCase(
            id=case_id,
            domain=domain,
            scenario=scenario,
            truth=truth,
            category=category,
            package=package,
            files=dict(files),
            malicious=malicious,
            note=note,
        )

    source = _require_str(record, "source", path, lineno)
    return SuiteCase(
        id=case_id,
        domain=domain,
        scenario=scenario,
        truth=truth,
        category=category,
        source=source,
        note=note,
    )


def load_suite(path: str | Path) -> SuiteFile:
    """Read a JSONL suite file, validating structure and label constraints."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SuiteParseError(f"cannot read suite file {path}: {exc}") from exc

    cases: list[SuiteCase] = []
    seen: set[str] = set()
    domain = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise _fail(path, lineno, f"invalid JSON: {exc.msg}") from exc
        case = case_from_record(record, path, lineno)
        if case.id in seen:
            raise _fail(path, lineno, f"duplicate case id {case.id!r}")
        seen.add(case.id)
        if domain and case.domain != domain:
            raise _fail(
                path, lineno, f"mixed domains: file started as {domain!r}, got {case.domain!r}"
            )
        domain = case.domain
        cases.append(case)

    if not cases:
        raise SuiteParseError(f"{path.name}: suite file holds no cases")
    return SuiteFile(domain=domain, cases=tuple(cases))


def dump_suite(suite: SuiteFile, path: str | Path) -> Path:
    """Write a suite as sorted-key JSONL; output is byte-stable per input."""
    path = Path(path)
    lines = [
        json.dumps(case.to_record(), sort_keys=True, ensure_ascii=False)
        for case in suite.cases
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
