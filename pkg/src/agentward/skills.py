"""Skill documents: parsing, risk tiers, and the functional-to-safe pairing.

A skill document is plain text with three headed sections:

    Trigger: {Name: email_sender, Capabilities: send_email}
    Task: Send an email to a specified recipient with given content.
    Resources: Interacts with the user's email API.

Trigger accepts either the braced form above or a bare activation name.
Task text may span lines and may embed decision directives, one per line:

    when tokens: export, payroll -> BLOCK
    when regex: (?i)external\\s+recipient -> REVIEW via user_confirm, log_event

Directives compile into engine rules; everything else in the task is prose
for the executing agent. Resources are catalog identifiers for enforcement
skills; functional skills usually carry a free-text interface binding, which
parses intact and is noted rather than dropped.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass
from pathlib import Path

from .decision.rules import Rule, compile_rule
from .errors import (
    EmptyDocumentError,
    IncompleteFactsError,
    MissingSectionError,
    PairExistsError,
    PairMissingError,
)
from .graph.model import INTERVENTION_RESOURCES, Trigger
from .verdicts import Severity

_SECTIONS = ("Name", "Trigger", "Task", "Resources", "Attachments")
_HEADER_RE = re.compile(r"^(Name|Trigger|Task|Resources|Attachments)\s*:\s?(.*)$")
_IDENT_RE = re.compile(r"^[a-z_][a-z0-9_]*$")

NOTE_UNKNOWN_RESOURCE = "unknown_resource"
NOTE_INTERFACE_BINDING = "interface_binding"


@dataclass(frozen=True)
class ParseNote:
    kind: str
    detail: str
    severity: Severity = Severity.LOW


@dataclass(frozen=True)
class SkillDocument:
    name: str
    trigger: Trigger
    task: str
    resources: tuple[str, ...]
    attachments: tuple[str, ...] = ()
    notes: tuple[ParseNote, ...] = ()

    def is_enforcement(self) -> bool:
        return bool(self.resources) and all(
            r in INTERVENTION_RESOURCES for r in self.resources
        )


def _parse_trigger(body: str) -> Trigger:
    body = body.strip()
    if body.startswith("{") and body.endswith("}"):
        inner = body[1:-1]
        fields = {}
        # keys located by position so capability lists may contain commas
        markers = [(m.start(), m.group(1)) for m in re.finditer(r"(Name|Capabilities|When)\s*:", inner)]
        for i, (pos, key) in enumerate(markers):
            end = markers[i + 1][0] if i + 1 < len(markers) else len(inner)
            value = inner[pos:end].split(":", 1)[1].strip().rstrip(",").strip()
            fields[key] = value
        caps = tuple(
            c.strip() for c in re.split(r"[,\s]+", fields.get("Capabilities", "")) if c.strip()
        )
        return Trigger(
            name=fields.get("Name", "").strip(),
            capabilities=caps,
            condition=fields.get("When", "").strip(),
        )
    parts = body.split(None, 1)
    if not parts:
        return Trigger(name="")
    if len(parts) == 1:
        return Trigger(name=parts[0])
    return Trigger(name=parts[0], condition=parts[1].strip())


def _parse_resources(body: str) -> tuple[tuple[str, ...], tuple[ParseNote, ...]]:
    items = [piece.strip() for piece in body.replace("\n", " ").split(",")]
    items = [piece for piece in items if piece]
    resources, notes = [], []
    for item in items:
        resources.append(item)
        if _IDENT_RE.match(item):
            if item not in INTERVENTION_RESOURCES:
                notes.append(
                    ParseNote(
                        NOTE_UNKNOWN_RESOURCE,
                        f"resource {item!r} is not in the catalog",
                        severity=Severity.MEDIUM,
                    )
                )
        else:
            notes.append(
                ParseNote(
                    NOTE_INTERFACE_BINDING,
                    f"free-text interface binding: {item!r}",
                    severity=Severity.LOW,
                )
            )
    return tuple(resources), tuple(notes)


def parse_skill_doc(text: str, name: str | None = None) -> SkillDocument:
    if not text or not text.strip():
        raise EmptyDocumentError("skill document is empty")

    bodies: dict[str, list[str]] = {}
    current: str | None = None
    for line in text.splitlines():
        header = _HEADER_RE.match(line)
        if header:
            current = header.group(1)
            bodies.setdefault(current, []).append(header.group(2))
        elif current is not None:
            bodies[current].append(line)
        # prose before the first header is tolerated and ignored

    for section in ("Trigger", "Task", "Resources"):
        if section not in bodies:
            raise MissingSectionError(section)

    trigger = _parse_trigger("\n".join(bodies["Trigger"]).strip())
    task = "\n".join(bodies["Task"]).strip()
    resources, notes = _parse_resources("\n".join(bodies["Resources"]))
    attachments = tuple(
        a.strip()
        for a in "\n".join(bodies.get("Attachments", [])).replace("\n", " ").split(",")
        if a.strip()
    )
    explicit_name = "\n".join(bodies.get("Name", [])).strip()
    return SkillDocument(
        name=name or explicit_name or trigger.name,
        trigger=trigger,
        task=task,
        resources=resources,
        attachments=attachments,
        notes=notes,
    )


def serialize_skill_doc(doc: SkillDocument) -> str:
    lines = []
    if doc.name and doc.name != doc.trigger.name:
        lines.append(f"Name: {doc.name}")
    t = doc.trigger
    if t.capabilities or t.condition:
        parts = [f"Name: {t.name}"]
        if t.capabilities:
            parts.append(f"Capabilities: {', '.join(t.capabilities)}")
        if t.condition:
            parts.append(f"When: {t.condition}")
        lines.append(f"Trigger: {{{', '.join(parts)}}}")
    else:
        lines.append(f"Trigger: {t.name}")
    lines.append(f"Task: {doc.task}")
    lines.append(f"Resources: {', '.join(doc.resources)}")
    if doc.attachments:
        lines.append(f"Attachments: {', '.join(doc.attachments)}")
    return "\n".join(lines) + "\n"


# -- risk rubric ---------------------------------------------------------------

RUBRIC: dict[str, dict[str, Severity]] = {
    "reversibility": {
        "fully_reversible": Severity.LOW,
        "short_recovery": Severity.MEDIUM,
        "hard_to_reverse": Severity.HIGH,
        "irreversible": Severity.CRITICAL,
    },
    "blast_radius": {
        "self_contained": Severity.LOW,
        "single_user": Severity.MEDIUM,
        "shared_resources": Severity.HIGH,
        "many_affected": Severity.CRITICAL,
    },
    "externality": {
        "fully_local": Severity.LOW,
        "cloud_api": Severity.MEDIUM,
        "external_system": Severity.HIGH,
        "real_world": Severity.CRITICAL,
    },
    "sensitivity": {
        "non_sensitive": Severity.LOW,
        "location_audio": Severity.MEDIUM,
        "private_data": Severity.HIGH,
        "credentials_money": Severity.CRITICAL,
    },
}

DIMENSIONS = tuple(RUBRIC)


@dataclass(frozen=True)
class RiskProfile:
    reversibility: Severity
    blast_radius: Severity
    externality: Severity
    sensitivity: Severity
    tier: Severity
    evidence: tuple[tuple[str, str], ...]


def classify_risk(doc: SkillDocument, facts: dict) -> RiskProfile:
    graded: dict[str, Severity] = {}
    evidence = []
    for dim in DIMENSIONS:
        if dim not in facts:
            raise IncompleteFactsError(f"missing dimension answer: {dim}")
        answer = str(facts[dim])
        table = RUBRIC[dim]
        if answer not in table:
            raise IncompleteFactsError(
                f"unknown {dim} answer {answer!r}; expected one of {sorted(table)}"
            )
        graded[dim] = table[answer]
        evidence.append((dim, answer))
    tier = max(graded.values(), key=lambda s: s.rank)
    return RiskProfile(
        reversibility=graded["reversibility"],
        blast_radius=graded["blast_radius"],
        externality=graded["externality"],
        sensitivity=graded["sensitivity"],
        tier=tier,
        evidence=tuple(evidence),
    )


# -- decision directives ---------------------------------------------------------

_DIRECTIVE_RE = re.compile(
    r"^\s*when\s+(tokens|regex|template)\s*:\s*(.+?)"
    r"(?:\s+direction\s+(additive|destructive|neutral|any))?"
    r"\s*->\s*(PASS|BLOCK|REVIEW)"
    r"(?:\s+via\s+([\w, ]+))?\s*$"
)

_VERDICT_ACTION = {"BLOCK": "HARD_BLOCK", "REVIEW": "REVIEW_GATE", "PASS": "ALLOW"}


@dataclass(frozen=True)
class Directive:
    kind: str
    pattern: str
    verdict: str
    direction: str = "any"
    resources: tuple[str, ...] = ()


def extract_directives(task: str) -> tuple[Directive, ...]:
    out = []
    for line in task.splitlines():
        m = _DIRECTIVE_RE.match(line)
        if not m:
            continue
        kind, pattern, direction, verdict, via = m.groups()
        resources = tuple(r.strip() for r in (via or "").split(",") if r.strip())
        out.append(
            Directive(
                kind=kind,
                pattern=pattern.strip(),
                verdict=verdict,
                direction=direction or "any",
                resources=resources,
            )
        )
    return tuple(out)


def directive_rules(doc: SkillDocument, prefix: str | None = None) -> list[Rule]:
    """Compile the document's directives into engine rules."""
    base = prefix or doc.name or "skill"
    rules = []
    for i, d in enumerate(extract_directives(doc.task)):
        pattern: str | list = d.pattern
        if d.kind == "tokens":
            pattern = [t.strip() for t in d.pattern.split(",") if t.strip()]
        rules.append(
            compile_rule(
                {
                    "id": f"{base}-d{i}",
                    "kind": d.kind,
                    "pattern": pattern,
                    "action": _VERDICT_ACTION[d.verdict],
                    "directionality": d.direction,
                    "scope": list(doc.trigger.capabilities),
                    "rationale": f"directive {i} of {base}",
                }
            )
        )
    return rules


# -- registry -------------------------------------------------------------------


class SafePairRegistry:
    """One enforcement counterpart per functional skill, persisted as JSON."""

    def __init__(self, path: str | Path | None = None) -> None:
        self._path = Path(path) if path is not None else None
        self._pairs: dict[str, SkillDocument] = {}
        self._lock = threading.RLock()
        if self._path is not None and self._path.exists():
            stored = json.loads(self._path.read_text(encoding="utf-8"))
            for functional, entry in stored.items():
                self._pairs[functional] = parse_skill_doc(entry["text"], name=entry["name"])

    def register_pair(
        self, functional: str, counterpart: SkillDocument, *, overwrite: bool = False
    ) -> None:
        with self._lock:
            if functional in self._pairs and not overwrite:
                raise PairExistsError(functional)
            self._pairs[functional] = counterpart
            self._save()

    def lookup_counterpart(self, functional: str) -> SkillDocument:
        with self._lock:
            try:
                return self._pairs[functional]
            except KeyError:
                raise PairMissingError(functional) from None

    def names(self) -> list[str]:
        with self._lock:
            return sorted(self._pairs)

    def __contains__(self, functional: str) -> bool:
        with self._lock:
            return functional in self._pairs

    def _save(self) -> None:
        if self._path is None:
            return
        payload = {
            fn: {"name": doc.name, "text": serialize_skill_doc(doc)}
            for fn, doc in self._pairs.items()
        }
        self._path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
