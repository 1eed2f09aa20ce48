"""Workflow supervision behind the operator control surface.

The supervisor owns every live workflow run: it threads graph executions,
parks review verdicts as tickets an operator can approve or deny, feeds
runtime events into the audit log, and wires the emergency stop switch.
All bookkeeping happens under one lock; blocking waits happen outside it,
so a parked review never holds up ticket resolution or audit streaming.
"""

from __future__ import annotations

import itertools
import threading
import time
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from ..config import Config
from ..errors import (
    IndexOutOfRangeError,
    TicketNotPendingError,
    UnknownTicketError,
)
from ..graph.model import Graph
from ..graph.runtime import ReviewRequest, Trajectory, run_workflow
from ..interventions.audit import AuditEvent, AuditLog, make_event
from ..interventions.stores import QuarantineEntry, QuarantineStore

TICKET_PENDING = "pending"
TICKET_APPROVED = "approved"
TICKET_DENIED = "denied"
TICKET_EXPIRED = "expired"
TICKET_STATES = (TICKET_PENDING, TICKET_APPROVED, TICKET_DENIED, TICKET_EXPIRED)

WORKFLOW_RUNNING = "running"
WORKFLOW_FAILED = "failed"

SCOPE_ALL = "all"

_EXCERPT_LIMIT = 160


def _excerpt(value: Any, limit: int = _EXCERPT_LIMIT) -> str:
    """Collapse a pending value into one displayable line."""
    text = value if isinstance(value, str) else repr(value)
    text = " ".join(text.split())
    if len(text) <= limit:
        return text
    return text[: limit - 3] + "..."


def _guard_index(graph: Graph) -> dict[str, str]:
    # Tickets name the functional node awaiting authorization, not the
    # guard that raised the review; invert the pairing to recover it.
    fronted: dict[str, list[str]] = {}
    for functional in graph.functional_ids():
        guard = graph.guard_of(functional)
        if guard is not None:
            fronted.setdefault(guard, []).append(functional)
    return {guard: ",".join(sorted(ids)) for guard, ids in fronted.items()}


@dataclass
class ReviewTicket:
    """One deferred functional step awaiting an operator verdict.

    ``node`` names the functional node whose step is suspended; the
    decision fields are flattened copies of the guard's review verdict.
    """

    id: str
    workflow: str
    node: str
    excerpt: str
    verdict: str
    severity: str
    rationale: str
    created: float
    state: str = TICKET_PENDING
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "workflow": self.workflow,
            "node": self.node,
            "excerpt": self.excerpt,
            "verdict": self.verdict,
            "severity": self.severity,
            "rationale": self.rationale,
            "created": self.created,
            "state": self.state,
            "note": self.note,
        }


@dataclass
class WorkflowHandle:
    """Book-keeping for one threaded workflow run."""

    id: str
    stop_flag: threading.Event
    thread: threading.Thread | None = None
    state: str = WORKFLOW_RUNNING
    trajectory: Trajectory | None = None
    error: str = ""


class Supervisor:
    """Runs workflows and arbitrates every operator-facing action on them.

    Review tickets default-deny: a ticket nobody resolves within
    ``config.ticket_timeout`` seconds expires, and expiry is recorded in
    the audit log as a denial. Approvals are likewise recorded before the
    suspended step is released, so an approved resolution always precedes
    the step it authorized in the audit stream.
    """

    def __init__(
        self,
        config: Config | None = None,
        *,
        audit: AuditLog | None = None,
        quarantine: QuarantineStore | None = None,
    ) -> None:
        self.config = config or Config()
        self.audit = audit if audit is not None else AuditLog()
        self.quarantine = quarantine if quarantine is not None else QuarantineStore()
        self._lock = threading.RLock()
        self._workflows: dict[str, WorkflowHandle] = {}
        self._tickets: dict[str, ReviewTicket] = {}
        self._waiters: dict[str, threading.Event] = {}
        self._answers: dict[str, bool] = {}
        self._wf_seq = itertools.count(1)
        self._ticket_seq = itertools.count(1)

    # -- workflow lifecycle ---------------------------------------------

    def start_workflow(
        self,
        graph: Graph,
        behaviors: Mapping[str, Callable],
        prompt: str = "",
        *,
        transforms: Mapping[str, Callable] | None = None,
        budget: int | None = None,
    ) -> str:
        """Launch a workflow run on its own thread; returns its id."""
        with self._lock:
            workflow_id = f"wf-{next(self._wf_seq):03d}"
        functional_of = _guard_index(graph)
        handle = WorkflowHandle(id=workflow_id, stop_flag=threading.Event())

        def resolver(request: ReviewRequest) -> bool:
            return self._await_review(handle, functional_of, request)

        def on_event(event: Mapping[str, Any]) -> None:
            self._on_runtime_event(workflow_id, event)

        def run() -> None:
            try:
                trajectory = run_workflow(
                    graph,
                    behaviors,
                    prompt,
                    budget=self.config.step_budget if budget is None else budget,
                    resolver=resolver,
                    transforms=transforms,
                    quarantine=self.quarantine,
                    stop_flag=handle.stop_flag,
                    on_event=on_event,
                )
            except Exception as exc:  # noqa: BLE001 - thread boundary
                with self._lock:
                    handle.error = str(exc)
                    handle.state = WORKFLOW_FAILED
                    handle.trajectory = getattr(exc, "trajectory", None)
                return
            with self._lock:
                handle.trajectory = trajectory
                handle.state = trajectory.terminal

        thread = threading.Thread(target=run, name=f"agentward-{workflow_id}", daemon=True)
        handle.thread = thread
        with self._lock:
            self._workflows[workflow_id] = handle
        self._record(
            workflow_id,
            "",
            "workflow_started",
            prompt,
            rationale=_excerpt(prompt),
        )
        thread.start()
        return workflow_id

    def workflows(self) -> dict[str, str]:
        """Current state per workflow id, in launch order."""
        with self._lock:
            return {wf: handle.state for wf, handle in self._workflows.items()}

    def trajectory_of(self, workflow_id: str) -> Trajectory | None:
        with self._lock:
            handle = self._workflows.get(workflow_id)
            return None if handle is None else handle.trajectory

    def wait_for(self, workflow_id: str | None = None, timeout: float | None = None) -> bool:
        """Join one workflow thread, or all of them; True when all ended."""
        with self._lock:
            if workflow_id is None:
                handles = list(self._workflows.values())
            elif workflow_id in self._workflows:
                handles = [self._workflows[workflow_id]]
            else:
                raise ValueError(f"unknown workflow: {workflow_id!r}")
        deadline = None if timeout is None else time.monotonic() + timeout
        for handle in handles:
            thread = handle.thread
            if thread is None:
                continue
            remaining = None
            if deadline is not None:
                remaining = max(0.0, deadline - time.monotonic())
            thread.join(remaining)
            if thread.is_alive():
                return False
        return True

    # -- review tickets ---------------------------------------------------

    def list_pending(self) -> tuple[ReviewTicket, ...]:
        """Pending tickets, oldest first."""
        with self._lock:
            return tuple(t for t in self._tickets.values() if t.state == TICKET_PENDING)

    def tickets(self) -> tuple[ReviewTicket, ...]:
        with self._lock:
            return tuple(self._tickets.values())

    def ticket(self, ticket_id: str) -> ReviewTicket:
        with self._lock:
            found = self._tickets.get(ticket_id)
            if found is None:
                raise UnknownTicketError(ticket_id)
            return found

    def resolve(self, ticket_id: str, decision: str, note: str = "") -> dict:
        """Approve or deny one pending ticket; resolving twice is refused."""
        if decision not in ("approve", "deny"):
            raise ValueError(f"decision must be 'approve' or 'deny', not {decision!r}")
        with self._lock:
            ticket = self._tickets.get(ticket_id)
            if ticket is None:
                raise UnknownTicketError(ticket_id)
            if ticket.state != TICKET_PENDING:
                raise TicketNotPendingError(ticket_id, ticket.state)
            approved = decision == "approve"
            ticket.state = TICKET_APPROVED if approved else TICKET_DENIED
            ticket.note = note
            self._answers[ticket_id] = approved
            # The audit record lands before the waiter wakes, so a released
            # step can never appear ahead of its authorization.
            self._record(
                ticket.workflow,
                ticket.node,
                "review_approved" if approved else "review_denied",
                ticket.excerpt,
                rationale=note,
                detail={"ticket": ticket_id, "expired": False},
            )
            waiter = self._waiters.get(ticket_id)
            if waiter is not None:
                waiter.set()
            return {"ticket": ticket_id, "state": ticket.state}

    def _await_review(
        self,
        handle: WorkflowHandle,
        functional_of: Mapping[str, str],
        request: ReviewRequest,
    ) -> bool:
        """Resolver hook: park the run on a ticket until someone answers."""
        decision = request.decision
        with self._lock:
            if handle.stop_flag.is_set():
                # Halting; refuse without parking a ticket nobody can see.
                return False
            suffix = request.ticket_id or f"tkt-x{next(self._ticket_seq):04d}"
            ticket = ReviewTicket(
                id=f"{handle.id}.{suffix}",
                workflow=handle.id,
                node=functional_of.get(request.guard_id, request.node_id),
                excerpt=_excerpt(request.value),
                verdict=decision.verdict.value,
                severity=decision.severity.value,
                rationale=decision.rationale,
                created=time.time(),
            )
            waiter = threading.Event()
            self._tickets[ticket.id] = ticket
            self._waiters[ticket.id] = waiter
            self._record(
                handle.id,
                ticket.node,
                "review_pending",
                ticket.excerpt,
                rationale=decision.rationale,
                detail={"ticket": ticket.id, "severity": ticket.severity},
            )
        waiter.wait(self.config.ticket_timeout)
        with self._lock:
            if ticket.state == TICKET_PENDING:
                ticket.state = TICKET_EXPIRED
                self._answers[ticket.id] = False
                self._record(
                    handle.id,
                    ticket.node,
                    "review_denied",
                    ticket.excerpt,
                    rationale="ticket expired without resolution; denied by default",
                    detail={"ticket": ticket.id, "expired": True},
                )
            self._waiters.pop(ticket.id, None)
            return self._answers.pop(ticket.id, False)

    # -- emergency stop ---------------------------------------------------

    def emergency_stop(self, scope: str = SCOPE_ALL) -> tuple[str, ...]:
        """Halt one workflow or all of them; returns ids actually halted.

        Only workflows still running and not already signalled count, so
        repeating a stop returns an empty tuple. Pending tickets of halted
        workflows are denied on the spot.
        """
        with self._lock:
            if scope == SCOPE_ALL:
                targets = list(self._workflows.values())
            else:
                found = self._workflows.get(scope)
                targets = [] if found is None else [found]
            halted: list[str] = []
            for handle in targets:
                if handle.state != WORKFLOW_RUNNING or handle.stop_flag.is_set():
                    continue
                handle.stop_flag.set()
                halted.append(handle.id)
                self._record(
                    handle.id,
                    "",
                    "emergency_stop",
                    scope,
                    rationale="halt requested",
                    detail={"scope": scope},
                )
                for ticket in self._tickets.values():
                    if ticket.workflow != handle.id or ticket.state != TICKET_PENDING:
                        continue
                    ticket.state = TICKET_DENIED
                    self._answers[ticket.id] = False
                    self._record(
                        handle.id,
                        ticket.node,
                        "review_denied",
                        ticket.excerpt,
                        rationale="denied by emergency stop",
                        detail={"ticket": ticket.id, "expired": False},
                    )
                    waiter = self._waiters.get(ticket.id)
                    if waiter is not None:
                        waiter.set()
            return tuple(halted)

    # -- audit stream -----------------------------------------------------

    def stream_audit(
        self, since: int, timeout: float | None = 0.0
    ) -> tuple[list[AuditEvent], int]:
        """Events from index ``since`` onward plus the next cursor.

        ``since`` equal to the current length is valid and waits up to
        ``timeout`` seconds for fresh events; anything outside [0, length]
        is refused.
        """
        size = len(self.audit.events())
        if since < 0 or since > size:
            raise IndexOutOfRangeError(since, size)
        fresh, _ = self.audit.tail(since - 1, timeout)
        return fresh, since + len(fresh)

    # -- quarantine -------------------------------------------------------

    def quarantine_entries(self, state: str | None = None) -> list[QuarantineEntry]:
        return self.quarantine.entries(state)

    def release_quarantine(self, entry_id: str) -> QuarantineEntry:
        entry = self.quarantine.release(entry_id)
        self._record(
            "",
            entry_id,
            "quarantine_released",
            entry.digest,
            rationale=entry.reason,
            detail={"entry": entry_id},
        )
        return entry

    # -- internals --------------------------------------------------------

    def _record(
        self,
        workflow: str,
        node: str,
        effect: str,
        content: Any,
        rationale: str = "",
        detail: dict | None = None,
    ) -> AuditEvent:
        event = make_event(workflow, node, effect, content, rationale=rationale, detail=detail)
        self.audit.record(event)
        return event

    def _on_runtime_event(self, workflow: str, event: Mapping[str, Any]) -> None:
        kind = str(event.get("type", ""))
        node = str(event.get("node", ""))
        detail = {k: v for k, v in event.items() if k not in ("type", "node")}
        if kind == "mediation":
            rationale = f"{event.get('verdict', '')}: {event.get('outcome', '')}"
        elif kind == "terminal":
            rationale = str(event.get("reason", ""))
        else:
            rationale = ""
        self._record(workflow, node, kind, detail, rationale=rationale, detail=detail)
