"""Enforcement resources: halt, confirm, log, quarantine, rewrite, recall, plan."""

from .audit import AuditEvent, AuditLog, content_digest, load_events, make_event
from .confirm import ConfirmationRequest, ConfirmChannel, ScriptedChannel
from .limits import ADMIT, CHUNK, DEFER, CallWindow, GateDecision, chunk_plan, rate_gate
from .pii import PiiFinding, find_pii, redact_pii
from .resources import (
    CONFIRMED,
    DENIED,
    HALTED,
    LOGGED,
    MATCHED,
    MODIFIED,
    PLAN,
    QUARANTINED,
    Effect,
    InvocationContext,
    Toolkit,
    invoke,
)
from .stores import (
    HELD,
    PURGED,
    RELEASED,
    FailureMemory,
    FailureRecord,
    QuarantineEntry,
    QuarantineStore,
)
from .termguard import (
    REQUIRES_DECOUPLED_CONTEXT,
    SAFE,
    ControlChannel,
    remediation_note,
    self_termination_guard,
)

__all__ = [
    "AuditEvent",
    "AuditLog",
    "content_digest",
    "load_events",
    "make_event",
    "ConfirmationRequest",
    "ConfirmChannel",
    "ScriptedChannel",
    "ADMIT",
    "CHUNK",
    "DEFER",
    "CallWindow",
    "GateDecision",
    "chunk_plan",
    "rate_gate",
    "PiiFinding",
    "find_pii",
    "redact_pii",
    "Effect",
    "InvocationContext",
    "Toolkit",
    "invoke",
    "CONFIRMED",
    "DENIED",
    "HALTED",
    "LOGGED",
    "MATCHED",
    "MODIFIED",
    "PLAN",
    "QUARANTINED",
    "FailureMemory",
    "FailureRecord",
    "QuarantineEntry",
    "QuarantineStore",
    "HELD",
    "RELEASED",
    "PURGED",
    "ControlChannel",
    "remediation_note",
    "self_termination_guard",
    "SAFE",
    "REQUIRES_DECOUPLED_CONTEXT",
]
