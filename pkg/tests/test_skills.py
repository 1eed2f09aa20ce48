"""Skill document parsing, risk tiers, directives, and the pair registry."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agentward.decision.rules import DecisionContext, evaluate_rules
from agentward.errors import (
    EmptyDocumentError,
    IncompleteFactsError,
    MissingSectionError,
    PairExistsError,
    PairMissingError,
)
from agentward.graph.model import Trigger
from agentward.skills import (
    DIMENSIONS,
    NOTE_INTERFACE_BINDING,
    NOTE_UNKNOWN_RESOURCE,
    RUBRIC,
    SafePairRegistry,
    SkillDocument,
    classify_risk,
    directive_rules,
    extract_directives,
    parse_skill_doc,
    serialize_skill_doc,
)
from agentward.verdicts import Severity, Verdict

PRIVACY_GUARD_TEXT = """\
Trigger: handle_personal_identifiable_information
Task: Prevent potential leakage of personally identifiable information. \
If personal data is detected in the current context, halt the agent execution \
or request user confirmation before proceeding.
Resources: stop, log_event, user_confirm
"""

MAILER_TEXT = """\
Trigger: {Name: email_sender, Capabilities: send_email}
Task: Send an email to a specified recipient with given content.
Resources: Interacts with the user's email API.
"""


def test_parse_enforcement_document():
    doc = parse_skill_doc(PRIVACY_GUARD_TEXT)
    assert doc.name == "handle_personal_identifiable_information"
    assert doc.trigger.name == "handle_personal_identifiable_information"
    assert doc.resources == ("stop", "log_event", "user_confirm")
    assert doc.is_enforcement()
    assert doc.notes == ()
    assert "halt the agent execution" in doc.task


def test_parse_functional_document():
    doc = parse_skill_doc(MAILER_TEXT)
    assert doc.trigger.name == "email_sender"
    assert doc.trigger.capabilities == ("send_email",)
    assert doc.resources == ("Interacts with the user's email API.",)
    assert not doc.is_enforcement()
    assert [n.kind for n in doc.notes] == [NOTE_INTERFACE_BINDING]


def test_missing_sections_are_named():
    with pytest.raises(MissingSectionError) as err:
        parse_skill_doc("Trigger: x\nResources: stop\n")
    assert err.value.section == "Task"
    with pytest.raises(MissingSectionError) as err:
        parse_skill_doc("Task: t\nResources: stop\n")
    assert err.value.section == "Trigger"
    with pytest.raises(MissingSectionError) as err:
        parse_skill_doc("Trigger: x\nTask: t\n")
    assert err.value.section == "Resources"


def test_empty_document_rejected():
    with pytest.raises(EmptyDocumentError):
        parse_skill_doc("   \n  \n")


def test_unknown_resource_is_kept_and_flagged():
    doc = parse_skill_doc("Trigger: g\nTask: t\nResources: stop, teleport\n")
    assert doc.resources == ("stop", "teleport")
    notes = [n for n in doc.notes if n.kind == NOTE_UNKNOWN_RESOURCE]
    assert len(notes) == 1
    assert notes[0].severity == Severity.MEDIUM
    assert not doc.is_enforcement()


def test_multiline_task_and_attachments():
    text = (
        "Trigger: {Name: exporter, Capabilities: files, send_email, When: on export}\n"
        "Task: Export the workbook.\n"
        "Check destinations before sending.\n"
        "Resources: log_event\n"
        "Attachments: helper.py, schema.json\n"
    )
    doc = parse_skill_doc(text)
    assert doc.trigger == Trigger(
        name="exporter", capabilities=("files", "send_email"), condition="on export"
    )
    assert doc.task == "Export the workbook.\nCheck destinations before sending."
    assert doc.attachments == ("helper.py", "schema.json")


GOLDEN_DOCS = [
    PRIVACY_GUARD_TEXT,
    MAILER_TEXT,
    "Name: wrapped\nTrigger: inner_name\nTask: t\nResources: stop\n",
    (
        "Trigger: {Name: g, When: output leaving the host}\n"
        "Task: line one\nline two\nwhen tokens: export, payroll -> BLOCK\n"
        "Resources: stop, log_event\nAttachments: a.md\n"
    ),
]


@pytest.mark.parametrize("text", GOLDEN_DOCS)
def test_serialize_parse_round_trip(text):
    doc = parse_skill_doc(text)
    again = parse_skill_doc(serialize_skill_doc(doc))
    assert again == doc


_name = st.from_regex(r"[a-z][a-z_]{0,10}", fullmatch=True)
_words = st.lists(_name, min_size=1, max_size=6).map(" ".join)


@settings(max_examples=50, deadline=None)
@given(
    name=_name,
    caps=st.lists(_name, max_size=3).map(tuple),
    condition=st.one_of(st.just(""), _words),
    task=_words,
    resources=st.lists(
        st.sampled_from(["stop", "log_event", "user_confirm", "quarantine"]),
        min_size=1,
        max_size=3,
        unique=True,
    ).map(tuple),
)
def test_round_trip_property(name, caps, condition, task, resources):
    doc = SkillDocument(
        name=name,
        trigger=Trigger(name=name, capabilities=caps, condition=condition),
        task=task,
        resources=resources,
    )
    assert parse_skill_doc(serialize_skill_doc(doc)) == doc


# -- risk classification --------------------------------------------------------


def _doc() -> SkillDocument:
    return parse_skill_doc(MAILER_TEXT)


def test_order_placing_profile_is_critical():
    profile = classify_risk(
        _doc(),
        {
            "reversibility": "irreversible",
            "blast_radius": "many_affected",
            "externality": "real_world",
            "sensitivity": "credentials_money",
        },
    )
    assert profile.tier == Severity.CRITICAL


def test_readonly_local_profile_is_low():
    profile = classify_risk(
        _doc(),
        {
            "reversibility": "fully_reversible",
            "blast_radius": "self_contained",
            "externality": "fully_local",
            "sensitivity": "non_sensitive",
        },
    )
    assert profile.tier == Severity.LOW


def test_workspace_profile_is_medium():
    profile = classify_risk(
        _doc(),
        {
            "reversibility": "short_recovery",
            "blast_radius": "single_user",
            "externality": "cloud_api",
            "sensitivity": "non_sensitive",
        },
    )
    assert profile.tier == Severity.MEDIUM
    assert ("externality", "cloud_api") in profile.evidence


def test_incomplete_or_unknown_facts_rejected():
    with pytest.raises(IncompleteFactsError):
        classify_risk(_doc(), {"reversibility": "irreversible"})
    with pytest.raises(IncompleteFactsError):
        classify_risk(
            _doc(),
            {
                "reversibility": "sorta",
                "blast_radius": "self_contained",
                "externality": "fully_local",
                "sensitivity": "non_sensitive",
            },
        )


_answers = {dim: sorted(RUBRIC[dim]) for dim in DIMENSIONS}


@settings(max_examples=80, deadline=None)
@given(
    facts=st.fixed_dictionaries({dim: st.sampled_from(_answers[dim]) for dim in DIMENSIONS})
)
def test_tier_is_max_of_dimensions(facts):
    profile = classify_risk(_doc(), facts)
    ranks = [getattr(profile, dim).rank for dim in DIMENSIONS]
    assert profile.tier.rank == max(ranks)


@settings(max_examples=80, deadline=None)
@given(
    facts=st.fixed_dictionaries({dim: st.sampled_from(_answers[dim]) for dim in DIMENSIONS}),
    bumped=st.sampled_from(DIMENSIONS),
)
def test_raising_one_dimension_never_lowers_tier(facts, bumped):
    base = classify_risk(_doc(), facts)
    table = RUBRIC[bumped]
    current_rank = table[facts[bumped]].rank
    higher = [a for a in table if table[a].rank > current_rank]
    if not higher:
        return
    raised = dict(facts, **{bumped: higher[0]})
    assert classify_risk(_doc(), raised).tier.rank >= base.tier.rank


# -- directives -------------------------------------------------------------------


DIRECTIVE_DOC = """\
Trigger: {Name: sheet_guard, Capabilities: sheets}
Task: Guard spreadsheet traffic.
when tokens: export, payroll -> BLOCK
when regex: (?i)share\\s+externally direction destructive -> REVIEW via user_confirm, log_event
when tokens: list, sheets -> PASS
this line is prose, not a directive
Resources: stop, log_event, user_confirm
"""


def test_extract_directives_shapes():
    doc = parse_skill_doc(DIRECTIVE_DOC)
    directives = extract_directives(doc.task)
    assert len(directives) == 3
    assert directives[0].verdict == "BLOCK" and directives[0].kind == "tokens"
    assert directives[1].direction == "destructive"
    assert directives[1].resources == ("user_confirm", "log_event")
    assert directives[2].verdict == "PASS"


def test_directive_rules_drive_the_engine():
    doc = parse_skill_doc(DIRECTIVE_DOC)
    ruleset = directive_rules(doc)
    context = DecisionContext(capabilities=("sheets",))

    blocked = evaluate_rules("export the payroll tab", context, ruleset)
    assert blocked is not None and blocked.verdict == Verdict.BLOCK

    reviewed = evaluate_rules("delete then share externally", context, ruleset)
    assert reviewed is not None and reviewed.verdict == Verdict.REVIEW

    allowed = evaluate_rules("list my sheets", context, ruleset)
    assert allowed is not None and allowed.verdict == Verdict.PASS

    assert evaluate_rules("rename the tab", context, ruleset) is None


def test_directive_ids_are_stable():
    doc = parse_skill_doc(DIRECTIVE_DOC)
    ruleset = directive_rules(doc, prefix="sheetmail")
    assert [r.id for r in ruleset] == ["sheetmail-d0", "sheetmail-d1", "sheetmail-d2"]


# -- registry ---------------------------------------------------------------------


def test_registry_pairing_lifecycle(tmp_path):
    path = tmp_path / "registry.json"
    registry = SafePairRegistry(path)
    guard = parse_skill_doc(PRIVACY_GUARD_TEXT)

    registry.register_pair("email_sender", guard)
    assert registry.lookup_counterpart("email_sender") == guard
    assert "email_sender" in registry

    with pytest.raises(PairExistsError):
        registry.register_pair("email_sender", guard)
    registry.register_pair("email_sender", guard, overwrite=True)

    with pytest.raises(PairMissingError):
        registry.lookup_counterpart("calendar")

    reopened = SafePairRegistry(path)
    assert reopened.lookup_counterpart("email_sender") == guard
    assert reopened.names() == ["email_sender"]


def test_registry_in_memory():
    registry = SafePairRegistry()
    registry.register_pair("x", parse_skill_doc(PRIVACY_GUARD_TEXT))
    assert registry.names() == ["x"]
