"""Append-only audit log with stable content digests.

One line per event. The log is the system of record for every enforcement
effect; replaying a file reconstructs the exact event sequence. A log opened
without a path lives in memory, which the tests and the embedded runner use.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import StoreUnavailableError


def content_digest(content) -> str:
    """Stable digest of any JSON-representable content."""
    canonical = json.dumps(content, sort_keys=True, separators=(",", ":"), default=repr)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class AuditEvent:
    timestamp: float
    workflow: str
    node: str
    effect: str
    rationale: str = ""
    digest: str = ""
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "workflow": self.workflow,
            "node": self.node,
            "effect": self.effect,
            "rationale": self.rationale,
            "digest": self.digest,
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AuditEvent":
        return cls(
            timestamp=d["timestamp"],
            workflow=d.get("workflow", ""),
            node=d.get("node", ""),
            effect=d.get("effect", ""),
            rationale=d.get("rationale", ""),
            digest=d.get("digest", ""),
            detail=d.get("detail", {}),
        )


def make_event(
    workflow: str,
    node: str,
    effect: str,
    content,
    rationale: str = "",
    detail: dict | None = None,
) -> AuditEvent:
    return AuditEvent(
        timestamp=time.time(),
        workflow=workflow,
        node=node,
        effect=effect,
        rationale=rationale,
        digest=content_digest(content),
        detail=detail or {},
    )


class AuditLog:
    """Serialized appends; waiters can block for events past an index."""

    def __init__(self, path: str | Path | None = None) -> None:
        self._path = Path(path) if path is not None else None
        self._events: list[AuditEvent] = []
        self._cond = threading.Condition()
        if self._path is not None and self._path.exists():
            self._events = load_events(self._path)

    def record(self, event: AuditEvent) -> None:
        with self._cond:
            if self._path is not None:
                try:
                    with self._path.open("a", encoding="utf-8") as fh:
                        fh.write(json.dumps(event.to_dict(), default=repr) + "\n")
                except OSError as exc:
                    raise StoreUnavailableError(f"audit log unwritable: {exc}") from exc
            self._events.append(event)
            self._cond.notify_all()

    def events(self) -> list[AuditEvent]:
        with self._cond:
            return list(self._events)

    def __len__(self) -> int:
        with self._cond:
            return len(self._events)

    def tail(self, after: int, timeout: float | None = None) -> tuple[list[AuditEvent], int]:
        """Events with index > after, blocking up to timeout for new ones.

        Returns (events, cursor); cursor is the new high-water index.
        """
        deadline = None if timeout is None else time.monotonic() + timeout
        with self._cond:
            while len(self._events) <= after + 1:
                remaining = None if deadline is None else deadline - time.monotonic()
                if remaining is not None and remaining <= 0:
                    break
                self._cond.wait(remaining)
            fresh = list(self._events[after + 1 :])
            cursor = len(self._events) - 1
            return fresh, cursor


def load_events(path: str | Path) -> list[AuditEvent]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(AuditEvent.from_dict(json.loads(line)))
    return out
