"""The six synthesis phases: model, spec, generate, evaluate, diagnose, refine.

Phase 3 lives in generate.py; everything else is here. Each phase is a pure
function of its inputs, which is what makes a whole synthesis run reproducible
from a seed.
"""

from __future__ import annotations

import re
from dataclasses import replace

from ..config import Config
from ..decision.judge import JudgeRequest
from ..decision.rules import DESTRUCTIVE_VERBS, evaluate_rules
from ..errors import JudgeUnavailableError
from ..graph.model import INTERVENTION_RESOURCES, Trigger
from ..normalize import normalize
from ..skills import Directive, SkillDocument, directive_rules, extract_directives
from ..verdicts import Verdict
from .model import (
    CATEGORY_ADVERSARIAL,
    CATEGORY_DIRECT,
    CAUSE_AMBIGUITY,
    CAUSE_CLASSES,
    CAUSE_REASONING,
    CAUSE_SPEC_GAP,
    CaseRow,
    EvalReport,
    FactoryConfig,
    RiskyOperation,
    RootCause,
    SpecDelta,
    TestCase,
    ThreatModel,
)
from .vocab import (
    AMBIGUITY_MARKERS,
    BENIGN_TAGS,
    LOCAL_MARKERS,
    RISK_TAGS,
    STOPWORDS,
    SYNONYM_TO_CANONICAL,
    SYNONYMS,
)

_WORD_RE = re.compile(r"[a-z][a-z0-9]*")

_JUDGE_CONFIDENCE = Config().judge_confidence


def _words(text: str) -> list[str]:
    return _WORD_RE.findall(normalize(text))


# -- phase 1: threat model -------------------------------------------------------


def _skill_words(skill: SkillDocument) -> set[str]:
    blob = " ".join(
        (
            skill.name,
            skill.trigger.name,
            " ".join(skill.trigger.capabilities),
            skill.trigger.condition,
            skill.task,
        )
    ).replace("_", " ")
    return set(_WORD_RE.findall(blob.lower()))


def _resolve_noun(skill: SkillDocument, tag: dict) -> str:
    """Pick the object noun a verb-tag operates on from the skill's own words."""
    claimed = tag["words"] | BENIGN_TAGS
    for cap in skill.trigger.capabilities:
        word = cap.lower()
        if word not in claimed and word.isalpha():
            return word
    for word in _WORD_RE.findall(skill.trigger.name.lower().replace("_", " ")):
        if word not in claimed:
            return word
    return "records"


def phase1_threat_model(skill: SkillDocument, judge=None) -> ThreatModel:
    """Enumerate gated operations from capability tags, screened by a judge.

    The tag table is the deterministic fallback; a judge, when present, can
    clear a candidate operation (confident PASS) or vouch for an untagged
    skill. Only a skill neither path covers is an error.
    """
    words = _skill_words(skill)
    ops: list[RiskyOperation] = []
    for tag in RISK_TAGS:
        if not (tag["words"] & words):
            continue
        keywords = tuple(
            kw if kw is not None else _resolve_noun(skill, tag) for kw in tag["keywords"]
        )
        ops.append(
            RiskyOperation(
                action=tag["action"],
                category=tag["category"],
                dimensions=dict(tag["dimensions"]),
                keywords=keywords,
                sensitive_terms=tuple(tag["sensitive_terms"]),
            )
        )
    covered = bool(ops) or bool(BENIGN_TAGS & words)

    if judge is not None:
        try:
            screened = []
            for op in ops:
                resp = judge.assess(
                    JudgeRequest(
                        action=f"{skill.name} may {op.action}",
                        context_excerpt=skill.task[:240],
                    )
                )
                if resp.verdict is Verdict.PASS and resp.confidence >= _JUDGE_CONFIDENCE:
                    continue
                screened.append(op)
            ops = screened
            if not ops and not covered:
                resp = judge.assess(
                    JudgeRequest(action=f"{skill.name}: {skill.task[:240]}")
                )
                if resp.verdict is Verdict.PASS and resp.confidence >= _JUDGE_CONFIDENCE:
                    covered = True
        except Exception:
            # a broken judge falls back to the tag table untouched
            pass

    if not ops and not covered:
        raise JudgeUnavailableError(
            f"no capability tag matches {skill.name!r} and no judge could vouch for it"
        )
    return ThreatModel(skill=skill.name, operations=tuple(ops))


# -- phase 2: counterpart spec -----------------------------------------------------

_RESOURCE_ORDER = (
    "stop",
    "user_confirm",
    "log_event",
    "quarantine",
    "modify_output",
    "failure_memory",
    "cli_plan",
)


def _render_directive(
    kind: str, pattern: str, verdict: str, via: tuple[str, ...], direction: str = "any"
) -> str:
    line = f"when {kind}: {pattern}"
    if direction and direction != "any":
        line += f" direction {direction}"
    line += f" -> {verdict}"
    if via:
        line += f" via {', '.join(via)}"
    return line


def _op_directive_lines(op: RiskyOperation) -> list[str]:
    lines = []
    if op.sensitive_terms:
        lines.append(
            _render_directive(
                "regex", "|".join(op.sensitive_terms), "BLOCK", ("stop", "log_event")
            )
        )
    # first cut gates on the object alone; refinement earns the verb and
    # direction qualifiers from observed failures
    lines.append(
        _render_directive("tokens", op.keywords[1], "REVIEW", ("user_confirm", "log_event"))
    )
    return lines


def _minimal_resources(task: str) -> tuple[str, ...]:
    used = {"log_event"}
    for directive in extract_directives(task):
        used.update(r for r in directive.resources if r in INTERVENTION_RESOURCES)
    return tuple(r for r in _RESOURCE_ORDER if r in used)


def phase2_write_spec(model: ThreatModel) -> SkillDocument:
    """Write the enforcement counterpart for a threat model."""
    name = f"{model.skill}_safe"
    if not model.operations:
        task = (
            f"Observe each operation {model.skill} performs and record an audit "
            "event; no gated operations were identified."
        )
        return SkillDocument(
            name=name,
            trigger=Trigger(
                name=name,
                capabilities=("audit",),
                condition=f"whenever {model.skill} runs",
            ),
            task=task,
            resources=("log_event",),
        )

    lines = [f"Mediate requests aimed at {model.skill} before they run."]
    for op in model.operations:
        lines.append(f"Gate for: {op.action}.")
        lines.extend(_op_directive_lines(op))
    lines.append("Anything no gate matches proceeds and is logged.")
    task = "\n".join(lines)
    capabilities = tuple(sorted({kw for op in model.operations for kw in op.keywords}))
    return SkillDocument(
        name=name,
        trigger=Trigger(
            name=name,
            capabilities=capabilities,
            condition=f"before {model.skill} performs a gated operation",
        ),
        task=task,
        resources=_minimal_resources(task),
    )


# -- phase 4: evaluation -----------------------------------------------------------


def phase4_evaluate(spec: SkillDocument, tests: list[TestCase], engine=None) -> EvalReport:
    """Run every case through the spec's rules and score against ground truth.

    ``engine`` is any callable mapping input text to a Decision or None; the
    default compiles the spec's directives. An unmatched case proceeds, so its
    decided verdict is PASS.
    """
    if engine is None:
        rules = directive_rules(spec)

        def engine(text: str):
            return evaluate_rules(text, None, rules, directionality=True)

    rows = []
    for case in tests:
        decision = engine(case.input)
        if decision is None:
            rows.append(CaseRow(case=case, decided=Verdict.PASS, provenance=("unmatched",)))
        else:
            rows.append(
                CaseRow(case=case, decided=decision.verdict, provenance=decision.provenance)
            )

    totals: dict[str, list[int]] = {}
    confusion = {
        t.value: {d.value: 0 for d in (Verdict.PASS, Verdict.REVIEW, Verdict.BLOCK)}
        for t in (Verdict.PASS, Verdict.REVIEW, Verdict.BLOCK)
    }
    fp, fn = [], []
    for row in rows:
        bucket = totals.setdefault(row.case.category, [0, 0])
        bucket[1] += 1
        bucket[0] += int(row.correct)
        confusion[row.case.truth.value][row.decided.value] += 1
        if row.case.truth is Verdict.PASS and row.decided is not Verdict.PASS:
            fp.append(row.case.id)
        elif row.case.truth is not Verdict.PASS and row.decided is Verdict.PASS:
            fn.append(row.case.id)

    per_category = {cat: correct / total for cat, (correct, total) in totals.items()}
    correct_all = sum(c for c, _ in totals.values())
    overall = correct_all / len(rows) if rows else 1.0
    return EvalReport(
        spec=spec,
        rows=tuple(rows),
        per_category=per_category,
        overall=overall,
        fp=tuple(fp),
        fn=tuple(fn),
        confusion=confusion,
    )


# -- phase 5: root-cause analysis ---------------------------------------------------


def _rule_ordinal(provenance: tuple[str, ...], base: str) -> int | None:
    for entry in provenance:
        if entry.startswith(f"rule:{base}-d"):
            tail = entry.rsplit("-d", 1)[1]
            if tail.isdigit():
                return int(tail)
    return None


def _lead_verb(text: str) -> str | None:
    for word in _words(text):
        if word not in STOPWORDS:
            return word
    return None


def _discriminating_verb(report: EvalReport, ordinal: int, failing: TestCase) -> str | None:
    """First word a correct direct case has that the failing audit lacks."""
    base = report.spec.name or "skill"
    rule_tag = f"rule:{base}-d{ordinal}"
    fail_words = set(_words(failing.input))
    for row in report.rows:
        if row.case.category != CATEGORY_DIRECT or not row.correct:
            continue
        if rule_tag not in row.provenance:
            continue
        for word in _words(row.case.input):
            if word in STOPWORDS or word in fail_words:
                continue
            return word
    return None


def _gate_directives(spec: SkillDocument) -> list[tuple[int, Directive]]:
    return [
        (i, d)
        for i, d in enumerate(extract_directives(spec.task))
        if d.verdict in ("BLOCK", "REVIEW")
    ]


def _regex_literals(pattern: str) -> list[str]:
    parts = re.sub(r"[()?:]", "", pattern).split("|")
    return [p.strip() for p in parts if p.strip()]


def phase5_root_cause(report: EvalReport, judge=None) -> list[RootCause]:
    """Explain every wrong verdict, or mark it unexplained.

    The deterministic classifier works from failure shape alone: a flagged
    audit is a gate firing without regard to operation direction, a missed
    obfuscation is a normalization hole, a missed paraphrase is either a
    vocabulary gap or a case only vague enough to review.
    """
    spec = report.spec
    base = spec.name or "skill"
    gates = _gate_directives(spec)
    token_gates = {
        i: tuple(t.strip() for t in d.pattern.split(",") if t.strip())
        for i, d in gates
        if d.kind == "tokens"
    }

    merged: dict[tuple, dict] = {}

    def record(case_id: str, cause_class: str, note: str, delta: SpecDelta | None) -> None:
        key = (
            (delta.kind, delta.target, delta.tokens, delta.verdict, delta.direction)
            if delta
            else ("unexplained", case_id)
        )
        entry = merged.setdefault(
            key, {"cases": [], "class": cause_class, "note": note, "delta": delta}
        )
        if case_id not in entry["cases"]:
            entry["cases"].append(case_id)

    for row in report.failures():
        case = row.case
        text_words = set(_words(case.input))

        if case.truth is Verdict.PASS:  # false positive
            ordinal = _rule_ordinal(row.provenance, base)
            if ordinal is None:
                record(
                    case.id,
                    CAUSE_REASONING,
                    "unexplained: flagged without a matching gate",
                    None,
                )
                continue
            target = f"{base}-d{ordinal}"
            verb = _discriminating_verb(report, ordinal, case)
            if verb and verb in DESTRUCTIVE_VERBS:
                delta = SpecDelta(kind="direction", target=target, direction="destructive")
                note = "directionality: gate fired on a read-only audit; tag it destructive"
            elif verb:
                delta = SpecDelta(kind="narrow", target=target, tokens=(verb,))
                note = f"directionality: gate keyed on the object alone; require {verb!r}"
            else:
                delta = SpecDelta(kind="direction", target=target, direction="destructive")
                note = "directionality: gate fired on a read-only audit"
            record(case.id, CAUSE_SPEC_GAP, note, delta)
            local = next((m for m in LOCAL_MARKERS if m in text_words), None)
            if local:
                lead = _lead_verb(case.input)
                tokens = tuple(t for t in (lead, local) if t)
                record(
                    case.id,
                    CAUSE_SPEC_GAP,
                    "destination not discriminated: allow the local form",
                    SpecDelta(kind="allow", tokens=tokens, verdict="PASS"),
                )
            continue

        if row.decided is Verdict.PASS:  # false negative
            if case.category == CATEGORY_ADVERSARIAL:
                target_ordinal = None
                for i, d in gates:
                    if d.kind != "regex":
                        continue
                    if any(lit in normalize(case.input) for lit in _regex_literals(d.pattern)):
                        target_ordinal = i
                        break
                if target_ordinal is not None:
                    record(
                        case.id,
                        CAUSE_SPEC_GAP,
                        "normalization gap: obfuscated form slipped a phrase gate",
                        SpecDelta(kind="retoken", target=f"{base}-d{target_ordinal}"),
                    )
                else:
                    record(
                        case.id,
                        CAUSE_SPEC_GAP,
                        "unexplained: normalization gap with no recoverable gate",
                        None,
                    )
                continue
            marker = next((m for m in AMBIGUITY_MARKERS if m in text_words), None)
            if marker:
                lead = _lead_verb(case.input)
                tokens = tuple(t for t in (lead, marker) if t)
                record(
                    case.id,
                    CAUSE_AMBIGUITY,
                    f"vague {marker!r} reference warrants review, not proof of harm",
                    SpecDelta(
                        kind="add_rule",
                        tokens=tokens,
                        verdict="REVIEW",
                        via=("user_confirm", "log_event"),
                    ),
                )
                continue
            tokens: list[str] = []
            lead = _lead_verb(case.input)
            if lead and (lead in SYNONYM_TO_CANONICAL or lead in SYNONYMS):
                tokens.append(lead)
            for _, gate_tokens in sorted(token_gates.items()):
                for gate_token in gate_tokens:
                    for syn in SYNONYMS.get(gate_token, ()):
                        if syn in text_words and syn not in tokens:
                            tokens.append(syn)
            if tokens:
                verdict = case.truth.value
                via = ("stop", "log_event") if case.truth is Verdict.BLOCK else (
                    "user_confirm",
                    "log_event",
                )
                record(
                    case.id,
                    CAUSE_SPEC_GAP,
                    "phrasing not covered: paraphrase maps back to a gated concept",
                    SpecDelta(kind="add_rule", tokens=tuple(tokens), verdict=verdict, via=via),
                )
            else:
                record(case.id, CAUSE_REASONING, "unexplained: missed with no mapping", None)
            continue

        # wrong strength (review vs block) with neither side passing
        record(case.id, CAUSE_REASONING, "unexplained: verdict strength mismatch", None)

    causes = [
        RootCause(
            cases=tuple(entry["cases"]),
            cause_class=entry["class"],
            note=entry["note"],
            delta=entry["delta"],
        )
        for entry in merged.values()
    ]

    if judge is not None:
        enriched = []
        for cause in causes:
            try:
                resp = judge.assess(
                    JudgeRequest(action=cause.note, context_excerpt=",".join(cause.cases))
                )
            except Exception:
                enriched.append(cause)
                continue
            override = next((c for c in CAUSE_CLASSES if c in resp.rationale.lower()), None)
            if override and override != cause.cause_class:
                enriched.append(replace(cause, cause_class=override))
            else:
                enriched.append(cause)
        causes = enriched
    return causes


# -- phase 6: refinement -------------------------------------------------------------


def _history_converged(history: list[float], cfg: FactoryConfig) -> bool:
    if len(history) >= cfg.max_iterations:
        return True
    if len(history) > cfg.k_consecutive:
        recent = history[-(cfg.k_consecutive + 1) :]
        return all(
            recent[i + 1] - recent[i] < cfg.epsilon for i in range(cfg.k_consecutive)
        )
    return False


def _rewrite_directive(directive: Directive, delta: SpecDelta) -> str | None:
    if delta.kind == "narrow" and directive.kind == "tokens":
        old = tuple(t.strip() for t in directive.pattern.split(",") if t.strip())
        tokens = tuple(dict.fromkeys(delta.tokens + old))
        return _render_directive(
            "tokens", ", ".join(tokens), directive.verdict, directive.resources,
            directive.direction,
        )
    if delta.kind == "direction":
        return _render_directive(
            directive.kind, directive.pattern, directive.verdict, directive.resources,
            delta.direction or "destructive",
        )
    if delta.kind == "retoken" and directive.kind == "regex":
        literals = _regex_literals(directive.pattern)
        if not literals:
            return None
        return _render_directive(
            "tokens", ", ".join(literals), directive.verdict, directive.resources,
            directive.direction,
        )
    return None


def phase6_refine(
    spec: SkillDocument,
    causes: list[RootCause],
    history: list[float],
    *,
    config: FactoryConfig | None = None,
) -> tuple[SkillDocument, bool]:
    """Apply proposed deltas and report whether the loop should stop.

    Converged means: nothing left to fix, or the accuracy history shows no
    meaningful improvement over the last k iterations, or the iteration cap
    is reached.
    """
    cfg = config or FactoryConfig()
    if not causes:
        return spec, True

    lines = spec.task.splitlines()
    directive_line_idx = [i for i, line in enumerate(lines) if extract_directives(line)]
    base = spec.name or "skill"
    appended: list[str] = []
    changed = False

    for cause in causes:
        delta = cause.delta
        if delta is None:
            continue
        if delta.kind in ("narrow", "direction", "retoken"):
            if not delta.target or not delta.target.startswith(f"{base}-d"):
                continue
            tail = delta.target.rsplit("-d", 1)[1]
            if not tail.isdigit() or int(tail) >= len(directive_line_idx):
                continue
            idx = directive_line_idx[int(tail)]
            directive = extract_directives(lines[idx])[0]
            new_line = _rewrite_directive(directive, delta)
            if new_line and new_line != lines[idx]:
                lines[idx] = new_line
                changed = True
        elif delta.kind in ("allow", "add_rule") and delta.tokens:
            verdict = "PASS" if delta.kind == "allow" else (delta.verdict or "REVIEW")
            via = delta.via or (
                ("log_event",) if delta.kind == "allow" else ("user_confirm", "log_event")
            )
            line = _render_directive("tokens", ", ".join(delta.tokens), verdict, via)
            if line not in lines and line not in appended:
                appended.append(line)
                changed = True

    if changed:
        task = "\n".join(lines + appended)
        spec = replace(spec, task=task, resources=_minimal_resources(task))
    return spec, _history_converged(history, cfg)
