"""Audit log, stores, confirmation, limits, termination guard, and invoke()."""

from __future__ import annotations

import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import enforcement_node, functional_node, passing_behaviors, pipeline_graph
from agentward.decision.judge import ScriptedJudge
from agentward.errors import (
    InvalidConfigError,
    StoreUnavailableError,
    UnauthorizedResourceError,
)
from agentward.graph.runtime import run_workflow
from agentward.interventions.audit import AuditLog, content_digest, load_events, make_event
from agentward.interventions.confirm import ConfirmationRequest, ConfirmChannel, ScriptedChannel
from agentward.interventions.limits import (
    ADMIT,
    CHUNK,
    DEFER,
    CallWindow,
    chunk_plan,
    rate_gate,
)
from agentward.interventions.resources import (
    CONFIRMED,
    DENIED,
    HALTED,
    LOGGED,
    MATCHED,
    MODIFIED,
    PLAN,
    QUARANTINED,
    DEFAULT_PLAN,
    PLAN_TEMPLATES,
    InvocationContext,
    Toolkit,
    invoke,
)
from agentward.interventions.stores import HELD, RELEASED, FailureMemory, QuarantineStore
from agentward.interventions.termguard import (
    REQUIRES_DECOUPLED_CONTEXT,
    SAFE,
    ControlChannel,
    remediation_note,
    self_termination_guard,
)


# -- audit --------------------------------------------------------------------


def test_audit_append_and_replay_in_memory():
    log = AuditLog()
    for i in range(3):
        log.record(make_event("wf", f"n{i}", "logged", {"i": i}))
    assert [e.node for e in log.events()] == ["n0", "n1", "n2"]
    assert len(log) == 3


def test_audit_file_replay_reconstructs_sequence(tmp_path):
    path = tmp_path / "audit.jsonl"
    log = AuditLog(path)
    log.record(make_event("wf", "g1", "halted", "payload-a", rationale="stop"))
    log.record(make_event("wf", "g2", "modified", "payload-b"))
    replayed = load_events(path)
    assert [(e.node, e.effect) for e in replayed] == [("g1", "halted"), ("g2", "modified")]
    assert replayed[0].digest == log.events()[0].digest

    reopened = AuditLog(path)
    assert [(e.node, e.effect) for e in reopened.events()] == [
        ("g1", "halted"),
        ("g2", "modified"),
    ]


def test_content_digest_stable_and_content_sensitive():
    assert content_digest({"a": 1, "b": 2}) == content_digest({"b": 2, "a": 1})
    assert content_digest("x") != content_digest("y")


def test_audit_tail_blocks_until_event():
    log = AuditLog()
    log.record(make_event("wf", "n0", "logged", 0))
    got = {}

    def waiter():
        got["events"], got["cursor"] = log.tail(after=0, timeout=5.0)

    t = threading.Thread(target=waiter)
    t.start()
    log.record(make_event("wf", "n1", "logged", 1))
    t.join(timeout=5.0)
    assert not t.is_alive()
    assert [e.node for e in got["events"]] == ["n1"]
    assert got["cursor"] == 1


def test_audit_tail_timeout_returns_empty():
    log = AuditLog()
    events, cursor = log.tail(after=-1, timeout=0.05)
    assert events == [] and cursor == -1


# -- failure memory -----------------------------------------------------------


def test_failure_memory_records_and_matches():
    mem = FailureMemory()
    mem.record("sent salary sheet to external address", outcome="blocked")
    hits = mem.match("sent salary sheet to external address")
    assert len(hits) == 1
    assert hits[0].outcome == "blocked"


def test_failure_memory_matches_obfuscated_recurrence():
    mem = FailureMemory()
    mem.record("email payroll data to rival.example", outcome="blocked")
    disguised = "EMAIL   payroll​ data to RIVAL.example"
    assert len(mem.match(disguised)) == 1
    assert mem.match("email vacation photos to a friend") == []


def test_failure_memory_survives_reopen(tmp_path):
    root = tmp_path / "memory"
    FailureMemory(root).record("leaked token in log output", outcome="reviewed")
    reopened = FailureMemory(root)
    assert len(reopened.match("leaked token in log output")) == 1
    assert reopened.records()[0].outcome == "reviewed"


# -- quarantine ---------------------------------------------------------------


def test_quarantine_hold_release_purge_lifecycle():
    q = QuarantineStore()
    entry = q.hold({"doc": "salaries.xlsx"}, origin="pii_guard", reason="pii")
    assert entry.state == HELD
    assert q.is_held({"doc": "salaries.xlsx"})

    released = q.release(entry.id)
    assert released.state == RELEASED
    assert not q.is_held({"doc": "salaries.xlsx"})

    entry2 = q.hold("raw dump", origin="pii_guard")
    q.purge(entry2.id)
    assert not q.is_held("raw dump")
    with pytest.raises(KeyError):
        q.payload_of(entry2.id)


def test_quarantine_double_transition_rejected():
    q = QuarantineStore()
    entry = q.hold("x")
    q.release(entry.id)
    with pytest.raises(StoreUnavailableError):
        q.release(entry.id)
    with pytest.raises(KeyError):
        q.release("q-9999")


def test_quarantine_state_filter_and_reopen(tmp_path):
    root = tmp_path / "quarantine"
    q = QuarantineStore(root)
    a = q.hold("alpha", reason="test")
    q.hold("beta")
    q.release(a.id)

    reopened = QuarantineStore(root)
    assert len(reopened.entries()) == 2
    assert [e.id for e in reopened.entries(state=HELD)] == [
        e.id for e in q.entries(state=HELD)
    ]
    assert reopened.is_held("beta")
    assert not reopened.is_held("alpha")
    assert reopened.payload_of(a.id) == "alpha"


def test_held_payload_never_reaches_functional_step():
    graph = pipeline_graph()
    q = QuarantineStore()
    q.hold("quarterly numbers", origin="intake_guard", reason="held upstream")
    trajectory = run_workflow(
        graph, passing_behaviors(), prompt="quarterly numbers", quarantine=q
    )
    held = "quarterly numbers"
    for step in trajectory.functional_steps():
        assert step.input != held
    assert "summarizer" in trajectory.blocked


# -- confirmation -------------------------------------------------------------


def test_confirm_resolved_approval():
    channel = ConfirmChannel()
    request = ConfirmationRequest(id=channel.next_id(), prompt="send it?", timeout=5.0)
    result = {}

    def asker():
        result["approved"] = channel.ask(request)

    t = threading.Thread(target=asker)
    t.start()
    for _ in range(500):
        if channel.pending():
            break
        threading.Event().wait(0.002)
    assert channel.resolve(request.id, approve=True)
    t.join(timeout=5.0)
    assert result["approved"] is True


def test_confirm_timeout_is_denial():
    channel = ConfirmChannel()
    request = ConfirmationRequest(id=channel.next_id(), prompt="risky?", timeout=0.02)
    assert channel.ask(request) is False
    assert channel.history()[-1][1] is False


def test_confirm_resolve_unknown_request():
    assert ConfirmChannel().resolve("cfm-0042", approve=True) is False


def test_confirm_rejects_nonpositive_timeout():
    with pytest.raises(ValueError):
        ConfirmationRequest(id="cfm-0001", prompt="p", timeout=0)


@settings(max_examples=25, deadline=None)
@given(prompt=st.text(max_size=40))
def test_unanswered_requests_always_deny(prompt):
    channel = ConfirmChannel()
    request = ConfirmationRequest(id=channel.next_id(), prompt=prompt, timeout=0.001)
    assert channel.ask(request) is False


# -- limits -------------------------------------------------------------------


def test_rate_gate_admit_under_limits():
    decision = rate_gate("mailer", calls_in_window=5, payload="hi", max_calls=10, max_input=100)
    assert decision.kind == ADMIT


def test_rate_gate_defers_when_window_full():
    decision = rate_gate("mailer", calls_in_window=10, payload="hi", max_calls=10, max_input=100)
    assert decision.kind == DEFER


def test_rate_gate_chunks_oversized_input():
    payload = "x" * 300
    decision = rate_gate("mailer", calls_in_window=0, payload=payload, max_calls=10, max_input=100)
    assert decision.kind == CHUNK
    assert len(decision.plan) == 3
    assert "".join(decision.plan) == payload
    assert all(len(seg) <= 100 for seg in decision.plan)


def test_rate_gate_rejects_bad_limits():
    with pytest.raises(InvalidConfigError):
        rate_gate("m", 0, "x", max_calls=0, max_input=10)
    with pytest.raises(InvalidConfigError):
        rate_gate("m", -1, "x", max_calls=5, max_input=10)
    with pytest.raises(InvalidConfigError):
        chunk_plan("abc", 0)


@settings(max_examples=60, deadline=None)
@given(payload=st.text(max_size=400), limit=st.integers(min_value=1, max_value=50))
def test_chunk_plan_partitions_exactly(payload, limit):
    plan = chunk_plan(payload, limit)
    assert "".join(plan) == payload
    assert all(0 < len(seg) <= limit for seg in plan)


def test_call_window_slides():
    now = [0.0]
    window = CallWindow(window=10.0, clock=lambda: now[0])
    window.note("a")
    window.note("a")
    assert window.count("a") == 2
    now[0] = 11.0
    assert window.count("a") == 0
    assert window.count("missing") == 0


# -- termination guard ----------------------------------------------------------


def test_restart_of_control_host_needs_decoupling():
    channel = ControlChannel(id="ops-shell", process_chain=("init", "gateway", "agent-session"))
    assert self_termination_guard({"gateway"}, channel) == REQUIRES_DECOUPLED_CONTEXT
    note = remediation_note({"gateway"}, channel)
    assert "gateway" in note and "ops-shell" in note


def test_restart_from_independent_session_is_safe():
    channel = ControlChannel(id="laptop", process_chain=("init", "sshd", "bash"))
    assert self_termination_guard({"gateway"}, channel) == SAFE


def test_empty_effect_set_is_safe():
    channel = ControlChannel(id="x", process_chain=("init", "gateway"))
    assert self_termination_guard(set(), channel) == SAFE


# -- invoke -------------------------------------------------------------------


GUARD_RESOURCES = (
    "stop",
    "user_confirm",
    "log_event",
    "quarantine",
    "modify_output",
    "failure_memory",
    "cli_plan",
)


def guard_context(toolkit=None, resources=GUARD_RESOURCES):
    kit = toolkit or Toolkit()
    node = enforcement_node("gatekeeper", behavior="check", resources=resources)
    return InvocationContext(node=node, toolkit=kit, workflow="wf-test"), kit


def test_invoke_requires_registration():
    ctx, _ = guard_context(resources=("log_event",))
    with pytest.raises(UnauthorizedResourceError):
        invoke("stop", "reason", ctx)
    functional_ctx = InvocationContext(
        node=functional_node("worker", behavior="w"), toolkit=Toolkit()
    )
    with pytest.raises(UnauthorizedResourceError):
        invoke("log_event", "x", functional_ctx)
    with pytest.raises(UnauthorizedResourceError):
        invoke("made_up_resource", "x", guard_context()[0])


def test_every_invoke_writes_one_audit_event():
    ctx, kit = guard_context(Toolkit(confirm=ScriptedChannel(default=True)))
    invoke("log_event", "first", ctx)
    invoke("modify_output", "no pii here", ctx)
    invoke("user_confirm", "ok to send?", ctx)
    invoke("quarantine", {"payload": "dump", "reason": "raw"}, ctx)
    invoke("failure_memory", {"record": "incident"}, ctx)
    invoke("failure_memory", "incident", ctx)
    invoke("cli_plan", {"finding": "leak", "type": "pii"}, ctx)
    invoke("stop", "done", ctx)
    events = kit.audit.events()
    assert len(events) == 8
    assert [e.effect for e in events] == [
        LOGGED,
        MODIFIED,
        CONFIRMED,
        QUARANTINED,
        LOGGED,
        MATCHED,
        PLAN,
        HALTED,
    ]
    assert all(e.node == "gatekeeper" and e.digest for e in events)


def test_invoke_stop_sets_flag_and_halts_workflow():
    kit = Toolkit()
    graph = pipeline_graph()
    behaviors = passing_behaviors()
    guard_node = graph.node("intake_guard")

    def stopping_guard(value, state):
        invoke("stop", "unsafe traffic", InvocationContext(guard_node, kit, "wf-halt"))
        from agentward.verdicts import Decision, Verdict

        return Decision(verdict=Verdict.PASS)

    behaviors["always_pass"] = stopping_guard
    trajectory = run_workflow(graph, behaviors, prompt="x", stop_flag=kit.stop_flag)
    assert kit.stop_flag.is_set()
    assert trajectory.terminal == "stopped"
    assert "sender" not in trajectory.node_order()


def test_invoke_confirm_paths():
    approved_ctx, _ = guard_context(Toolkit(confirm=ScriptedChannel({"go?": True})))
    assert invoke("user_confirm", "go?", approved_ctx).kind == CONFIRMED

    denied_ctx, _ = guard_context(Toolkit(confirm=ScriptedChannel()))
    assert invoke("user_confirm", {"prompt": "go?"}, denied_ctx).kind == DENIED

    silent_ctx, _ = guard_context(Toolkit(confirm=None))
    assert invoke("user_confirm", "go?", silent_ctx).kind == DENIED

    class BrokenChannel:
        def ask(self, request):
            raise RuntimeError("socket down")

    broken_ctx, _ = guard_context(Toolkit(confirm=BrokenChannel()))
    assert invoke("user_confirm", "go?", broken_ctx).kind == DENIED


def test_invoke_quarantine_then_membership():
    ctx, kit = guard_context()
    effect = invoke("quarantine", {"payload": "raw export", "reason": "unvetted"}, ctx)
    assert effect.kind == QUARANTINED
    assert kit.quarantine.is_held("raw export")


def test_invoke_modify_output_redacts():
    ctx, _ = guard_context()
    effect = invoke("modify_output", "Call me at 555-0142", ctx)
    assert effect.kind == MODIFIED
    assert effect.value == "Call me at [REDACTED:phone]"


def test_invoke_failure_memory_match_escalation_path():
    ctx, kit = guard_context()
    invoke("failure_memory", {"record": "mailed the ledger to odd.example"}, ctx)
    effect = invoke("failure_memory", "MAILED the ledger to odd.example", ctx)
    assert effect.kind == MATCHED
    assert len(effect.records) == 1

    miss = invoke("failure_memory", "posted a meeting agenda", ctx)
    assert miss.kind == MATCHED and miss.records == ()


def test_invoke_cli_plan_static_and_judged():
    ctx, _ = guard_context()
    static = invoke("cli_plan", {"finding": "phone in body", "type": "pii"}, ctx)
    assert static.kind == PLAN
    assert static.value == PLAN_TEMPLATES["pii"]
    assert invoke("cli_plan", "odd case", ctx).value == DEFAULT_PLAN

    judge = ScriptedJudge(
        [{"match": "*", "verdict": "REVIEW", "confidence": 0.9, "rationale": "rotate the key"}]
    )
    judged_ctx, _ = guard_context(Toolkit(judge=judge))
    assert invoke("cli_plan", {"finding": "token leak", "type": "creds"}, judged_ctx).value == (
        "rotate the key"
    )


def test_invoke_fails_closed_when_audit_unwritable():
    class DeadLog(AuditLog):
        def record(self, event):
            raise StoreUnavailableError("disk gone")

    ctx, kit = guard_context(Toolkit(audit=DeadLog()))
    effect = invoke("log_event", "x", ctx)
    assert effect.kind == HALTED
    assert kit.stop_flag.is_set()


def test_invoke_fails_closed_when_memory_store_breaks():
    class DeadMemory(FailureMemory):
        def match(self, text):
            raise StoreUnavailableError("index corrupt")

    ctx, kit = guard_context(Toolkit(memory=DeadMemory()))
    effect = invoke("failure_memory", "anything", ctx)
    assert effect.kind == HALTED
    assert kit.stop_flag.is_set()
