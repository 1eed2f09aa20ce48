"""Deterministic rule layer and the second-pass intent classifier.

Rules match against normalized action text so casing tricks, zero-width
padding, and base64-wrapped commands face the same patterns as plain text.
A rule can demand an intent class; a destructive-only rule then stays quiet
on additive or read-only phrasings of the same nouns, which is what keeps
benign maintenance commands from tripping noun-keyed gates.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import InvalidPatternError
from ..normalize import normalize
from ..verdicts import Decision, Severity, Verdict

ACTIONS = ("HARD_BLOCK", "REVIEW_GATE", "ALLOW")
DIRECTIONALITIES = ("additive", "destructive", "neutral", "any")

# strongest action first, used for the no-HARD_BLOCK fallback ordering
_ACTION_STRENGTH = {"HARD_BLOCK": 3, "REVIEW_GATE": 2, "ALLOW": 1}

_ACTION_VERDICT = {
    "HARD_BLOCK": Verdict.BLOCK,
    "REVIEW_GATE": Verdict.REVIEW,
    "ALLOW": Verdict.PASS,
}

_DEFAULT_SEVERITY = {
    "HARD_BLOCK": Severity.HIGH,
    "REVIEW_GATE": Severity.MEDIUM,
    "ALLOW": Severity.LOW,
}

# template placeholders expand to these character classes
_TEMPLATE_CLASSES = {
    "word": r"[\w-]+",
    "number": r"\d+",
    "path": r"[\w./~-]+",
    "email": r"\S+@\S+",
    "any": r".+?",
}

_PLACEHOLDER = re.compile(r"\{([a-z]+)\}")


# -- intent classification ----------------------------------------------------

ADDITIVE_VERBS = frozenset(
    {
        "add",
        "create",
        "append",
        "insert",
        "compose",
        "attach",
        "schedule",
        "enable",
        "grant",
        "register",
        "invite",
        "subscribe",
        "upload",
        "install",
    }
)

DESTRUCTIVE_VERBS = frozenset(
    {
        "delete",
        "discard",
        "remove",
        "trash",
        "wipe",
        "erase",
        "drop",
        "clear",
        "purge",
        "revoke",
        "disable",
        "destroy",
        "cancel",
        "unsubscribe",
        "overwrite",
        "truncate",
    }
)

_WORD = re.compile(r"[a-z]+")


def classify_intent(action: str) -> str:
    """Class the action by its first recognized verb; unknown verbs are neutral."""
    for token in _WORD.findall(normalize(action)):
        if token in ADDITIVE_VERBS:
            return "additive"
        if token in DESTRUCTIVE_VERBS:
            return "destructive"
    return "neutral"


# -- rules --------------------------------------------------------------------


@dataclass(frozen=True)
class Rule:
    id: str
    kind: str  # tokens | regex | template
    pattern: str | tuple[str, ...]
    action: str
    scope: tuple[str, ...] = ()
    directionality: str = "any"
    severity: Severity | None = None
    rationale: str = ""
    enabled: bool = True
    # one pattern for regex/template rules, a tuple (AND semantics) for tokens
    compiled: re.Pattern | tuple[re.Pattern, ...] | None = field(
        default=None, compare=False, repr=False
    )

    def effective_severity(self) -> Severity:
        return self.severity or _DEFAULT_SEVERITY[self.action]


@dataclass(frozen=True)
class DecisionContext:
    """What the rule layer may know beyond the action text."""

    capabilities: tuple[str, ...] = ()
    excerpt: str = ""


def _compile_template(rule_id: str, template: str) -> re.Pattern:
    out, cursor = [], 0
    for match in _PLACEHOLDER.finditer(template):
        out.append(re.escape(template[cursor : match.start()]))
        cls = match.group(1)
        if cls not in _TEMPLATE_CLASSES:
            raise InvalidPatternError(f"rule {rule_id}: unknown template class {{{cls}}}")
        out.append(_TEMPLATE_CLASSES[cls])
        cursor = match.end()
    out.append(re.escape(template[cursor:]))
    # literal spacing in templates tolerates any whitespace run
    body = "".join(out).replace(r"\ ", r"\s+")
    return re.compile(body)


def compile_rule(raw: dict) -> Rule:
    """Validate one rule record and precompile its matcher."""
    missing = {"id", "pattern", "action"} - set(raw)
    if missing:
        raise InvalidPatternError(f"rule record missing fields: {sorted(missing)}")
    rule_id = str(raw["id"])
    action = raw["action"]
    if action not in ACTIONS:
        raise InvalidPatternError(f"rule {rule_id}: unknown action {action!r}")
    directionality = raw.get("directionality", "any")
    if directionality not in DIRECTIONALITIES:
        raise InvalidPatternError(
            f"rule {rule_id}: unknown directionality {directionality!r}"
        )
    kind = raw.get("kind", "regex")

    severity = None
    if raw.get("severity"):
        try:
            severity = Severity(raw["severity"])
        except ValueError as exc:
            raise InvalidPatternError(f"rule {rule_id}: bad severity {raw['severity']!r}") from exc
    effective = severity or _DEFAULT_SEVERITY[action]
    if action == "HARD_BLOCK" and effective.rank < Severity.HIGH.rank:
        raise InvalidPatternError(
            f"rule {rule_id}: HARD_BLOCK severity must be HIGH or CRITICAL"
        )

    pattern = raw["pattern"]
    if kind == "tokens":
        if isinstance(pattern, str):
            tokens = tuple(pattern.split())
        else:
            tokens = tuple(str(t) for t in pattern)
        if not tokens:
            raise InvalidPatternError(f"rule {rule_id}: empty token set")
        normalized_tokens = tuple(normalize(t) for t in tokens)
        compiled = tuple(
            re.compile(r"(?<!\w)" + re.escape(t) + r"(?!\w)") for t in normalized_tokens
        )
        pattern_value: str | tuple[str, ...] = normalized_tokens
    elif kind == "regex":
        if not isinstance(pattern, str):
            raise InvalidPatternError(f"rule {rule_id}: regex pattern must be a string")
        try:
            compiled = re.compile(pattern)
        except re.error as exc:
            raise InvalidPatternError(f"rule {rule_id}: bad regex: {exc}") from exc
        pattern_value = pattern
    elif kind == "template":
        if not isinstance(pattern, str):
            raise InvalidPatternError(f"rule {rule_id}: template pattern must be a string")
        compiled = _compile_template(rule_id, normalize(pattern))
        pattern_value = pattern
    else:
        raise InvalidPatternError(f"rule {rule_id}: unknown pattern kind {kind!r}")

    return Rule(
        id=rule_id,
        kind=kind,
        pattern=pattern_value,
        action=action,
        scope=tuple(raw.get("scope", ())),
        directionality=directionality,
        severity=severity,
        rationale=raw.get("rationale", ""),
        enabled=bool(raw.get("enabled", True)),
        compiled=compiled,
    )


def load_ruleset(path: str | Path) -> list[Rule]:
    """Load a JSONL ruleset; any malformed record aborts the load."""
    rules: list[Rule] = []
    seen: set[str] = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InvalidPatternError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
        rule = compile_rule(raw)
        if rule.id in seen:
            raise InvalidPatternError(f"{path}:{lineno}: duplicate rule id {rule.id!r}")
        seen.add(rule.id)
        rules.append(rule)
    return rules


def _rule_matches(
    rule: Rule,
    normalized: str,
    intent: str,
    context: DecisionContext | None,
    *,
    directionality: bool,
) -> bool:
    if not rule.enabled:
        return False
    if rule.scope and context is not None and context.capabilities:
        if not set(rule.scope) & set(context.capabilities):
            return False
    if directionality and rule.directionality != "any" and rule.directionality != intent:
        return False
    if rule.kind == "tokens":
        return all(p.search(normalized) for p in rule.compiled)
    return rule.compiled.search(normalized) is not None


def evaluate_rules(
    action: str,
    context: DecisionContext | None,
    ruleset: list[Rule],
    *,
    directionality: bool = True,
) -> Decision | None:
    """First HARD_BLOCK (lowest id) wins; else the strongest matched action,
    lowest id on ties; None when nothing matches."""
    normalized = normalize(action)
    intent = classify_intent(action)
    matched = [
        r
        for r in ruleset
        if _rule_matches(r, normalized, intent, context, directionality=directionality)
    ]
    if not matched:
        return None
    matched.sort(key=lambda r: (-_ACTION_STRENGTH[r.action], r.id))
    winner = matched[0]
    others = [r.id for r in matched[1:]]
    rationale = winner.rationale or f"matched rule {winner.id}"
    if others:
        rationale += f" (also matched: {', '.join(others)})"
    return Decision(
        verdict=_ACTION_VERDICT[winner.action],
        severity=winner.effective_severity(),
        rationale=rationale,
        provenance=(f"rule:{winner.id}",),
    )
