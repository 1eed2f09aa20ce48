"""Dispatch for the seven enforcement resources.

invoke() is the single entry point guards use to act on the world: halt the
workflow, ask the user, log, quarantine, rewrite an output, consult failure
memory, or request a remediation plan. Every successful invoke appends
exactly one audit event; replaying the log reconstructs the effect sequence.

Store failures never fall open. A broken confirmation channel reads as
denial; a broken quarantine or memory store halts; an unwritable audit log
halts, because unrecorded enforcement is indistinguishable from none.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from ..errors import StoreUnavailableError, UnauthorizedResourceError
from ..graph.model import INTERVENTION_RESOURCES, NodeSpec
from .audit import AuditLog, make_event
from .confirm import ConfirmationRequest
from .pii import redact_pii
from .stores import FailureMemory, QuarantineStore

HALTED = "halted"
CONFIRMED = "confirmed"
DENIED = "denied"
LOGGED = "logged"
QUARANTINED = "quarantined"
MODIFIED = "modified"
MATCHED = "matched"
PLAN = "plan"

PLAN_TEMPLATES = {
    "pii": "redact the flagged spans, rerun the action on the redacted payload, "
    "and notify the data owner",
    "exfiltration": "revoke the outbound credential, block the destination, and "
    "sweep the audit trail for earlier sends",
    "rate": "defer remaining calls to the next window and batch inputs under the "
    "configured ceiling",
    "termination": "schedule the restart from a decoupled session so the control "
    "channel survives it",
}
DEFAULT_PLAN = (
    "hold the action, capture the evidence in the audit log, and route the case "
    "to a human reviewer"
)


@dataclass(frozen=True)
class Effect:
    kind: str
    value: object = None
    records: tuple = ()
    rationale: str = ""


@dataclass
class Toolkit:
    """Shared stores and channels available to enforcement nodes."""

    audit: AuditLog = field(default_factory=AuditLog)
    memory: FailureMemory = field(default_factory=FailureMemory)
    quarantine: QuarantineStore = field(default_factory=QuarantineStore)
    confirm: object = None
    judge: object = None
    stop_flag: threading.Event = field(default_factory=threading.Event)
    confirm_timeout: float = 600.0


@dataclass
class InvocationContext:
    node: NodeSpec
    toolkit: Toolkit
    workflow: str = "workflow"


def _confirm_request(kit: Toolkit, payload) -> ConfirmationRequest:
    if isinstance(payload, dict):
        prompt = str(payload.get("prompt", ""))
        evidence = str(payload.get("evidence", ""))
        timeout = float(payload.get("timeout", kit.confirm_timeout))
    else:
        prompt, evidence, timeout = str(payload), "", kit.confirm_timeout
    request_id = kit.confirm.next_id() if hasattr(kit.confirm, "next_id") else "cfm-0000"
    return ConfirmationRequest(id=request_id, prompt=prompt, evidence=evidence, timeout=timeout)


def _plan_text(kit: Toolkit, finding: str, finding_type: str) -> str:
    if kit.judge is not None:
        from ..decision.judge import JudgeRequest

        try:
            response = kit.judge.assess(
                JudgeRequest(
                    action=f"remediation plan: {finding}",
                    context_excerpt=finding,
                    policy_excerpt=finding_type,
                )
            )
            if response.rationale:
                return response.rationale
        except Exception:
            pass
    return PLAN_TEMPLATES.get(finding_type, DEFAULT_PLAN)


def invoke(resource: str, payload, context: InvocationContext) -> Effect:
    node = context.node
    kit = context.toolkit
    if resource not in INTERVENTION_RESOURCES:
        raise UnauthorizedResourceError(node.id, resource)
    if resource not in node.resources:
        raise UnauthorizedResourceError(node.id, resource)

    effect = _dispatch(resource, payload, context)

    try:
        kit.audit.record(
            make_event(
                workflow=context.workflow,
                node=node.id,
                effect=effect.kind,
                content=payload,
                rationale=effect.rationale,
                detail={"resource": resource},
            )
        )
    except StoreUnavailableError as exc:
        kit.stop_flag.set()
        return Effect(HALTED, rationale=f"audit unavailable, halting: {exc}")
    return effect


def _dispatch(resource: str, payload, context: InvocationContext) -> Effect:
    kit = context.toolkit
    node = context.node

    if resource == "stop":
        kit.stop_flag.set()
        return Effect(HALTED, rationale=str(payload) if payload else "stopped by guard")

    if resource == "user_confirm":
        if kit.confirm is None:
            return Effect(DENIED, rationale="no confirmation channel, default deny")
        request = _confirm_request(kit, payload)
        try:
            approved = bool(kit.confirm.ask(request))
        except Exception as exc:
            return Effect(DENIED, rationale=f"confirmation channel failed: {exc}")
        if approved:
            return Effect(CONFIRMED, rationale=request.prompt)
        return Effect(DENIED, rationale=request.prompt or "denied or timed out")

    if resource == "log_event":
        return Effect(LOGGED, rationale=str(payload)[:200])

    if resource == "quarantine":
        if isinstance(payload, dict) and "payload" in payload:
            held, reason = payload["payload"], str(payload.get("reason", ""))
        else:
            held, reason = payload, ""
        try:
            entry = kit.quarantine.hold(held, origin=node.id, reason=reason)
        except StoreUnavailableError as exc:
            kit.stop_flag.set()
            return Effect(HALTED, rationale=f"quarantine unavailable, halting: {exc}")
        return Effect(QUARANTINED, value=entry.id, rationale=reason)

    if resource == "modify_output":
        text = payload if isinstance(payload, str) else str(payload)
        redacted, findings = redact_pii(text)
        kinds = ", ".join(f.kind for f in findings) if findings else "no changes"
        return Effect(MODIFIED, value=redacted, rationale=kinds)

    if resource == "failure_memory":
        try:
            if isinstance(payload, dict) and "record" in payload:
                rec = kit.memory.record(
                    str(payload["record"]), outcome=str(payload.get("outcome", ""))
                )
                return Effect(LOGGED, value=rec.id, rationale="incident recorded")
            text = payload["match"] if isinstance(payload, dict) else str(payload)
            hits = kit.memory.match(str(text))
            return Effect(
                MATCHED,
                records=tuple(hits),
                rationale=f"{len(hits)} prior incident(s)" if hits else "no prior incidents",
            )
        except StoreUnavailableError as exc:
            kit.stop_flag.set()
            return Effect(HALTED, rationale=f"failure memory unavailable, halting: {exc}")

    if resource == "cli_plan":
        if isinstance(payload, dict):
            finding = str(payload.get("finding", ""))
            ftype = str(payload.get("type", ""))
        else:
            finding, ftype = str(payload), ""
        return Effect(PLAN, value=_plan_text(kit, finding, ftype), rationale=ftype)

    raise UnauthorizedResourceError(node.id, resource)
