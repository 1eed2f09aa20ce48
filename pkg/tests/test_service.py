"""Supervisor and control API behavior.

The load-bearing guarantees checked here: a deferred functional step never
executes without an approved resolution recorded earlier in the audit log,
an emergency stop ends all functional activity, and an unresolved ticket
expires into a denial.
"""

from __future__ import annotations

import http.client
import json
import threading
import time
from pathlib import Path

import pytest

from conftest import passing_behaviors, pipeline_graph, review_decision

from agentward.config import Config
from agentward.errors import (
    IndexOutOfRangeError,
    StoreUnavailableError,
    TicketNotPendingError,
    UnknownTicketError,
)
from agentward.service import (
    TICKET_DENIED,
    TICKET_EXPIRED,
    ControlApiServer,
    Supervisor,
)

CONTRACT_PATH = Path(__file__).resolve().parents[1] / "contracts" / "control-api-v1.json"

WAIT = 5.0


def reviewing_behaviors(**overrides):
    """Pipeline behaviors with the outbound guard demanding review."""
    behaviors = passing_behaviors()
    behaviors["pii_check"] = lambda value, state: review_decision("outbound needs a look")
    behaviors.update(overrides)
    return behaviors


def make_supervisor(**config) -> Supervisor:
    config.setdefault("ticket_timeout", 30.0)
    return Supervisor(Config(**config))


def wait_pending(supervisor: Supervisor, count: int = 1, deadline: float = WAIT):
    limit = time.monotonic() + deadline
    while time.monotonic() < limit:
        pending = supervisor.list_pending()
        if len(pending) >= count:
            return pending
        time.sleep(0.005)
    raise AssertionError(f"never saw {count} pending tickets")


def effects_of(supervisor: Supervisor) -> list[tuple[str, str, str]]:
    events, _ = supervisor.stream_audit(0)
    return [(e.effect, e.workflow, e.node) for e in events]


# -- ticket lifecycle ---------------------------------------------------------


def test_approve_resumes_suspended_step():
    supervisor = make_supervisor()
    wf = supervisor.start_workflow(pipeline_graph(), reviewing_behaviors(), "hello")
    ticket = wait_pending(supervisor)[0]
    assert ticket.workflow == wf
    assert ticket.node == "sender"
    assert ticket.verdict == "REVIEW"
    assert ticket.excerpt == "summary(hello)"

    ack = supervisor.resolve(ticket.id, "approve", note="looks fine")
    assert ack == {"ticket": ticket.id, "state": "approved"}
    assert supervisor.wait_for(wf, timeout=WAIT)

    trajectory = supervisor.trajectory_of(wf)
    assert trajectory.terminal == "completed"
    assert trajectory.final_output() == "sent:summary(hello)"
    assert supervisor.workflows()[wf] == "completed"


def test_approval_recorded_before_released_step():
    supervisor = make_supervisor()
    wf = supervisor.start_workflow(pipeline_graph(), reviewing_behaviors(), "order")
    ticket = wait_pending(supervisor)[0]
    supervisor.resolve(ticket.id, "approve")
    assert supervisor.wait_for(wf, timeout=WAIT)

    effects = effects_of(supervisor)
    approved_at = effects.index(("review_approved", wf, "sender"))
    executed_at = effects.index(("execution", wf, "sender"))
    assert approved_at < executed_at
    # and the pending record precedes the approval
    assert effects.index(("review_pending", wf, "sender")) < approved_at


def test_deny_blocks_the_step():
    supervisor = make_supervisor()
    wf = supervisor.start_workflow(pipeline_graph(), reviewing_behaviors(), "secret")
    ticket = wait_pending(supervisor)[0]
    supervisor.resolve(ticket.id, "deny", note="not on my watch")
    assert supervisor.wait_for(wf, timeout=WAIT)

    trajectory = supervisor.trajectory_of(wf)
    assert "sender" in trajectory.blocked
    assert trajectory.final_output() == "summary(secret)"
    assert supervisor.ticket(ticket.id).state == TICKET_DENIED
    effects = effects_of(supervisor)
    assert ("execution", wf, "sender") not in effects
    assert ("review_denied", wf, "sender") in effects


def test_resolution_errors():
    supervisor = make_supervisor()
    wf = supervisor.start_workflow(pipeline_graph(), reviewing_behaviors(), "x")
    ticket = wait_pending(supervisor)[0]

    with pytest.raises(ValueError, match="approve"):
        supervisor.resolve(ticket.id, "maybe")
    with pytest.raises(UnknownTicketError):
        supervisor.resolve("no-such-ticket", "deny")

    supervisor.resolve(ticket.id, "deny")
    with pytest.raises(TicketNotPendingError) as excinfo:
        supervisor.resolve(ticket.id, "approve")
    assert excinfo.value.state == TICKET_DENIED
    with pytest.raises(UnknownTicketError):
        supervisor.ticket("no-such-ticket")
    supervisor.wait_for(wf, timeout=WAIT)


def test_pending_listing_is_oldest_first():
    supervisor = make_supervisor()
    first = supervisor.start_workflow(pipeline_graph(), reviewing_behaviors(), "one")
    wait_pending(supervisor, 1)
    second = supervisor.start_workflow(pipeline_graph(), reviewing_behaviors(), "two")
    pending = wait_pending(supervisor, 2)

    assert [t.workflow for t in pending] == [first, second]
    assert pending[0].created <= pending[1].created
    assert all(t.state == "pending" for t in pending)

    for ticket in pending:
        supervisor.resolve(ticket.id, "deny")
    assert supervisor.list_pending() == ()
    assert len(supervisor.tickets()) == 2
    supervisor.wait_for(timeout=WAIT)


def test_expiry_defaults_to_denial():
    supervisor = make_supervisor(ticket_timeout=0.15)
    wf = supervisor.start_workflow(pipeline_graph(), reviewing_behaviors(), "slowpoke")
    ticket = wait_pending(supervisor)[0]
    assert supervisor.wait_for(wf, timeout=WAIT)

    assert supervisor.ticket(ticket.id).state == TICKET_EXPIRED
    assert supervisor.list_pending() == ()
    assert "sender" in supervisor.trajectory_of(wf).blocked

    events, _ = supervisor.stream_audit(0)
    denials = [e for e in events if e.effect == "review_denied"]
    assert len(denials) == 1
    assert denials[0].detail == {"ticket": ticket.id, "expired": True}
    with pytest.raises(TicketNotPendingError):
        supervisor.resolve(ticket.id, "approve")


# -- emergency stop -----------------------------------------------------------


def test_stop_halts_every_running_workflow():
    supervisor = make_supervisor()
    ids = [
        supervisor.start_workflow(pipeline_graph(), reviewing_behaviors(), f"job {i}")
        for i in range(3)
    ]
    wait_pending(supervisor, 3)

    halted = supervisor.emergency_stop("all")
    assert sorted(halted) == sorted(ids)
    assert supervisor.emergency_stop("all") == ()
    assert supervisor.wait_for(timeout=WAIT)

    assert supervisor.list_pending() == ()
    events, _ = supervisor.stream_audit(0)
    stop_at = min(i for i, e in enumerate(events) if e.effect == "emergency_stop")
    assert all(e.effect != "execution" for e in events[stop_at:] if e.workflow in ids)


def test_stop_scoped_to_one_workflow():
    supervisor = make_supervisor()
    doomed = supervisor.start_workflow(pipeline_graph(), reviewing_behaviors(), "halt me")
    wait_pending(supervisor, 1)
    spared = supervisor.start_workflow(pipeline_graph(), reviewing_behaviors(), "keep me")
    wait_pending(supervisor, 2)

    assert supervisor.emergency_stop(doomed) == (doomed,)
    assert supervisor.emergency_stop(doomed) == ()
    assert supervisor.emergency_stop("wf-999") == ()

    remaining = supervisor.list_pending()
    assert [t.workflow for t in remaining] == [spared]
    supervisor.resolve(remaining[0].id, "approve")
    assert supervisor.wait_for(timeout=WAIT)
    assert supervisor.trajectory_of(spared).final_output() == "sent:summary(keep me)"
    assert "sender" in supervisor.trajectory_of(doomed).blocked


def test_stop_lands_at_the_next_step_boundary():
    gate = threading.Event()

    def slow_summarize(value, state):
        gate.set()
        time.sleep(0.3)
        return f"summary({value})"

    supervisor = make_supervisor()
    wf = supervisor.start_workflow(
        pipeline_graph(),
        reviewing_behaviors(summarize=slow_summarize),
        "interrupted",
    )
    assert gate.wait(WAIT)
    assert supervisor.emergency_stop("all") == (wf,)
    assert supervisor.wait_for(wf, timeout=WAIT)

    trajectory = supervisor.trajectory_of(wf)
    assert trajectory.terminal == "stopped"
    assert supervisor.workflows()[wf] == "stopped"
    effects = effects_of(supervisor)
    assert ("execution", wf, "summarizer") in effects
    assert ("execution", wf, "sender") not in effects


def test_behavior_crash_marks_workflow_failed():
    def exploding(value, state):
        raise RuntimeError("summarizer fell over")

    supervisor = make_supervisor()
    wf = supervisor.start_workflow(
        pipeline_graph(), reviewing_behaviors(summarize=exploding), "boom"
    )
    assert supervisor.wait_for(wf, timeout=WAIT)
    assert supervisor.workflows()[wf] == "failed"
    events, _ = supervisor.stream_audit(0)
    terminal = [e for e in events if e.effect == "terminal"]
    assert terminal and terminal[-1].rationale == "failed"


# -- audit stream -------------------------------------------------------------


def test_stream_audit_since_semantics():
    supervisor = make_supervisor()
    wf = supervisor.start_workflow(pipeline_graph(), passing_behaviors(), "quiet run")
    assert supervisor.wait_for(wf, timeout=WAIT)

    events, cursor = supervisor.stream_audit(0)
    assert cursor == len(events) > 0
    assert events[0].effect == "workflow_started"

    middle, end = supervisor.stream_audit(2)
    assert [e.digest for e in middle] == [e.digest for e in events[2:]]
    assert end == cursor

    fresh, again = supervisor.stream_audit(cursor)
    assert fresh == [] and again == cursor

    with pytest.raises(IndexOutOfRangeError):
        supervisor.stream_audit(cursor + 1)
    with pytest.raises(IndexOutOfRangeError):
        supervisor.stream_audit(-1)


def test_stream_audit_long_poll_wakes_on_new_event():
    supervisor = make_supervisor()
    _, cursor = supervisor.stream_audit(0)

    def later():
        time.sleep(0.15)
        supervisor.start_workflow(pipeline_graph(), passing_behaviors(), "late arrival")

    threading.Thread(target=later, daemon=True).start()
    started = time.monotonic()
    events, nxt = supervisor.stream_audit(cursor, timeout=WAIT)
    elapsed = time.monotonic() - started

    assert events and events[0].effect == "workflow_started"
    assert nxt == cursor + len(events)
    assert 0.1 <= elapsed < WAIT
    supervisor.wait_for(timeout=WAIT)


def test_quarantine_release_is_audited():
    supervisor = make_supervisor()
    entry = supervisor.quarantine.hold("payload", origin="summarizer", reason="untrusted")
    assert [e.id for e in supervisor.quarantine_entries("held")] == [entry.id]

    released = supervisor.release_quarantine(entry.id)
    assert released.state == "released"
    events, _ = supervisor.stream_audit(0)
    assert events[-1].effect == "quarantine_released"
    assert events[-1].detail == {"entry": entry.id}
    with pytest.raises(StoreUnavailableError):
        supervisor.release_quarantine(entry.id)


# -- http surface -------------------------------------------------------------

_UNSET = object()


class Client:
    def __init__(self, server: ControlApiServer, token: str = ""):
        self.host, self.port = server.address
        self.token = token

    def request(self, method: str, path: str, body=None, token=_UNSET):
        conn = http.client.HTTPConnection(self.host, self.port, timeout=10)
        headers = {}
        tok = self.token if token is _UNSET else token
        if tok:
            headers["Authorization"] = f"Bearer {tok}"
        data = None
        if body is not None:
            data = body if isinstance(body, (str, bytes)) else json.dumps(body)
            headers["Content-Type"] = "application/json"
        try:
            conn.request(method, path, body=data, headers=headers)
            response = conn.getresponse()
            raw = response.read()
            if response.headers.get_content_type() == "application/json":
                return response.status, json.loads(raw)
            return response.status, raw
        finally:
            conn.close()


@pytest.fixture
def serve():
    servers = []

    def factory(supervisor: Supervisor, **kwargs) -> ControlApiServer:
        server = ControlApiServer(supervisor, port=0, **kwargs)
        server.start()
        servers.append(server)
        return server

    yield factory
    for server in servers:
        server.stop()


def test_http_token_required_when_configured(serve):
    supervisor = make_supervisor(api_token="hunter2")
    client = Client(serve(supervisor), token="hunter2")

    status, body = client.request("GET", "/v1/health", token=None)
    assert status == 401
    assert body["error"]["code"] == "unauthorized"
    status, _ = client.request("GET", "/v1/tickets", token="wrong")
    assert status == 401
    status, body = client.request("GET", "/v1/health")
    assert (status, body) == (200, {"ok": True, "version": "v1"})


def test_http_open_when_no_token_configured(serve):
    client = Client(serve(make_supervisor()))
    status, body = client.request("GET", "/v1/health", token=None)
    assert (status, body) == (200, {"ok": True, "version": "v1"})


def test_http_ticket_flow(serve):
    supervisor = make_supervisor()
    client = Client(serve(supervisor))
    wf = supervisor.start_workflow(pipeline_graph(), reviewing_behaviors(), "over http")
    wait_pending(supervisor)

    status, page = client.request("GET", "/v1/tickets")
    assert status == 200
    (ticket,) = page["tickets"]
    assert ticket["workflow"] == wf and ticket["state"] == "pending"

    status, ack = client.request(
        "POST", f"/v1/tickets/{ticket['id']}/resolve", {"decision": "approve", "note": "ok"}
    )
    assert (status, ack) == (200, {"ticket": ticket["id"], "state": "approved"})
    assert supervisor.wait_for(wf, timeout=WAIT)
    assert supervisor.trajectory_of(wf).final_output() == "sent:summary(over http)"

    status, body = client.request(
        "POST", f"/v1/tickets/{ticket['id']}/resolve", {"decision": "deny"}
    )
    assert (status, body["error"]["code"]) == (409, "ticket_not_pending")
    status, body = client.request("POST", "/v1/tickets/ghost/resolve", {"decision": "deny"})
    assert (status, body["error"]["code"]) == (404, "unknown_ticket")
    status, body = client.request(
        "POST", f"/v1/tickets/{ticket['id']}/resolve", {"decision": "shrug"}
    )
    assert (status, body["error"]["code"]) == (400, "bad_request")


def test_http_stop_and_audit(serve):
    supervisor = make_supervisor()
    client = Client(serve(supervisor))
    wf = supervisor.start_workflow(pipeline_graph(), reviewing_behaviors(), "halt over http")
    wait_pending(supervisor)

    status, body = client.request("POST", "/v1/stop", {"scope": "all"})
    assert (status, body) == (200, {"halted": [wf]})
    status, body = client.request("POST", "/v1/stop", {})
    assert (status, body) == (200, {"halted": []})
    assert supervisor.wait_for(timeout=WAIT)

    status, page = client.request("GET", "/v1/audit?since=0")
    assert status == 200
    assert page["next"] == len(page["events"])
    assert page["events"][0]["effect"] == "workflow_started"
    assert any(e["effect"] == "emergency_stop" for e in page["events"])

    status, body = client.request("GET", f"/v1/audit?since={page['next'] + 10}")
    assert (status, body["error"]["code"]) == (416, "index_out_of_range")
    status, body = client.request("GET", "/v1/audit?since=nope")
    assert (status, body["error"]["code"]) == (400, "bad_request")


def test_http_audit_long_poll(serve):
    supervisor = make_supervisor()
    client = Client(serve(supervisor))
    _, cursor = supervisor.stream_audit(0)

    def later():
        time.sleep(0.15)
        supervisor.start_workflow(pipeline_graph(), passing_behaviors(), "late")

    threading.Thread(target=later, daemon=True).start()
    status, page = client.request("GET", f"/v1/audit?since={cursor}&timeout=5")
    assert status == 200
    assert page["events"] and page["events"][0]["effect"] == "workflow_started"
    assert page["next"] == cursor + len(page["events"])
    supervisor.wait_for(timeout=WAIT)


def test_http_quarantine_flow(serve):
    supervisor = make_supervisor()
    client = Client(serve(supervisor))
    entry = supervisor.quarantine.hold("payload", origin="summarizer", reason="untrusted")

    status, page = client.request("GET", "/v1/quarantine")
    assert status == 200
    assert [e["id"] for e in page["entries"]] == [entry.id]

    status, body = client.request("POST", f"/v1/quarantine/{entry.id}/release")
    assert status == 200
    assert body["entry"]["state"] == "released"
    status, body = client.request("POST", f"/v1/quarantine/{entry.id}/release")
    assert (status, body["error"]["code"]) == (409, "quarantine_state")


def test_http_static_console(serve, tmp_path):
    ui = tmp_path / "dist"
    ui.mkdir()
    (ui / "index.html").write_text("<!doctype html><p>console</p>")
    (ui / "app.js").write_text("console.log('hi')")
    (tmp_path / "secret.txt").write_text("keep out")

    server = serve(make_supervisor(), ui_root=ui)
    client = Client(server)

    status, body = client.request("GET", "/ui/")
    assert status == 200 and b"console" in body
    status, body = client.request("GET", "/ui/app.js")
    assert status == 200 and b"hi" in body
    status, body = client.request("GET", "/ui/../secret.txt")
    assert status == 404
    status, body = client.request("GET", "/ui/missing.css")
    assert status == 404

    conn = http.client.HTTPConnection(*server.address, timeout=10)
    conn.request("GET", "/")
    response = conn.getresponse()
    response.read()
    assert response.status == 302
    assert response.headers["Location"] == "/ui/"
    conn.close()


def test_http_console_absent_is_a_plain_404(serve):
    client = Client(serve(make_supervisor()))
    status, body = client.request("GET", "/ui/")
    assert status == 404
    assert body["error"]["code"] == "no_console"


def test_http_rejects_garbage(serve):
    client = Client(serve(make_supervisor()))
    status, body = client.request("GET", "/v1/nothing")
    assert (status, body["error"]["code"]) == (404, "not_found")
    status, body = client.request("POST", "/v1/stop", "not json{")
    assert (status, body["error"]["code"]) == (400, "bad_request")
    status, body = client.request("POST", "/v1/stop", "[1, 2]")
    assert (status, body["error"]["code"]) == (400, "bad_request")
    status, body = client.request("POST", "/ui/index.html")
    assert (status, body["error"]["code"]) == (405, "method_not_allowed")


# -- published contract -------------------------------------------------------


def contract():
    return json.loads(CONTRACT_PATH.read_text())


def test_contract_paths_cover_every_route():
    endpoints = contract()["endpoints"]
    assert {e["path"] for e in endpoints.values()} == {
        "/v1/health",
        "/v1/tickets",
        "/v1/tickets/{id}/resolve",
        "/v1/stop",
        "/v1/audit",
        "/v1/quarantine",
        "/v1/quarantine/{id}/release",
    }
    assert contract()["ticket_states"] == ["pending", "approved", "denied", "expired"]


def test_contract_shapes_match_live_responses(serve):
    shapes = contract()["shapes"]
    supervisor = make_supervisor()
    client = Client(serve(supervisor))
    entry = supervisor.quarantine.hold("payload", origin="summarizer", reason="untrusted")
    supervisor.start_workflow(pipeline_graph(), reviewing_behaviors(), "contract run")
    wait_pending(supervisor)

    _, health = client.request("GET", "/v1/health")
    assert health == shapes["health"]

    _, page = client.request("GET", "/v1/tickets")
    assert set(page) == set(shapes["tickets_page"])
    assert set(page["tickets"][0]) == set(shapes["ticket"])

    ticket_id = page["tickets"][0]["id"]
    _, ack = client.request(
        "POST", f"/v1/tickets/{ticket_id}/resolve", dict(shapes["resolve_request"])
    )
    assert set(ack) == set(shapes["resolve_ack"])

    _, ack = client.request("POST", "/v1/stop", dict(shapes["stop_request"]))
    assert set(ack) == set(shapes["stop_ack"])

    _, page = client.request("GET", "/v1/audit?since=0")
    assert set(page) == set(shapes["audit_page"])
    assert set(page["events"][0]) == set(shapes["audit_event"])

    _, page = client.request("GET", "/v1/quarantine")
    assert set(page) == set(shapes["quarantine_page"])
    assert set(page["entries"][0]) == set(shapes["quarantine_entry"])

    _, ack = client.request("POST", f"/v1/quarantine/{entry.id}/release")
    assert set(ack) == set(shapes["release_ack"])
    assert set(ack["entry"]) == set(shapes["release_ack"]["entry"])

    _, err = client.request("POST", "/v1/tickets/ghost/resolve", {"decision": "deny"})
    assert set(err) == set(shapes["error"])
    assert set(err["error"]) == set(shapes["error"]["error"])
    supervisor.wait_for(timeout=WAIT)


def test_contract_error_codes_match_live_statuses(serve):
    codes = contract()["errors"]
    supervisor = make_supervisor(api_token="tok")
    client = Client(serve(supervisor), token="tok")

    status, _ = client.request("GET", "/v1/tickets", token=None)
    assert status == codes["unauthorized"]
    status, _ = client.request("GET", "/v1/audit?since=99")
    assert status == codes["index_out_of_range"]
    status, _ = client.request("POST", "/v1/tickets/ghost/resolve", {"decision": "deny"})
    assert status == codes["unknown_ticket"]
    status, _ = client.request("GET", "/v1/missing")
    assert status == codes["not_found"]
    status, _ = client.request("POST", "/v1/stop", "broken{")
    assert status == codes["bad_request"]
