"""Failure memory and quarantine: directory-backed stores with an index file.

Both stores also run fully in memory when constructed without a root, which
keeps unit tests hermetic. File layout under a root:

    index.json          list of entry headers
    <entry-id>.json     the stored payload for that entry

Failure memory matches by normalized signature, so a recurrence that differs
only in case, spacing, zero-width padding, or base64 wrapping still hits the
stored incident. Quarantine holds a payload snapshot out of the data flow
until someone releases or purges it; membership is checked by digest.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import StoreUnavailableError
from ..normalize import signature
from .audit import content_digest

HELD = "held"
RELEASED = "released"
PURGED = "purged"


@dataclass(frozen=True)
class FailureRecord:
    id: str
    signature: str
    incident: str
    outcome: str
    created: float

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "signature": self.signature,
            "incident": self.incident,
            "outcome": self.outcome,
            "created": self.created,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FailureRecord":
        return cls(d["id"], d["signature"], d["incident"], d["outcome"], d["created"])


@dataclass(frozen=True)
class QuarantineEntry:
    id: str
    digest: str
    origin: str
    reason: str
    state: str
    created: float

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "digest": self.digest,
            "origin": self.origin,
            "reason": self.reason,
            "state": self.state,
            "created": self.created,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuarantineEntry":
        return cls(d["id"], d["digest"], d["origin"], d["reason"], d["state"], d["created"])


class _DirStore:
    """Shared persistence plumbing; subclasses define row (de)serialization."""

    def __init__(self, root: str | Path | None) -> None:
        self._root = Path(root) if root is not None else None
        self._lock = threading.Lock()
        self._rows: list = []
        if self._root is not None:
            try:
                self._root.mkdir(parents=True, exist_ok=True)
                index = self._root / "index.json"
                if index.exists():
                    self._rows = [self._row_from(d) for d in json.loads(index.read_text())]
            except (OSError, ValueError) as exc:
                raise StoreUnavailableError(f"store root unusable: {exc}") from exc

    def _row_from(self, d: dict):
        raise NotImplementedError

    def _flush(self) -> None:
        if self._root is None:
            return
        try:
            index = self._root / "index.json"
            index.write_text(json.dumps([r.to_dict() for r in self._rows], indent=2))
        except OSError as exc:
            raise StoreUnavailableError(f"store index unwritable: {exc}") from exc

    def _write_body(self, entry_id: str, payload) -> None:
        if self._root is None:
            return
        try:
            body = self._root / f"{entry_id}.json"
            body.write_text(json.dumps({"payload": payload}, default=repr))
        except OSError as exc:
            raise StoreUnavailableError(f"store body unwritable: {exc}") from exc


class FailureMemory(_DirStore):
    def __init__(self, root: str | Path | None = None) -> None:
        super().__init__(root)

    def _row_from(self, d: dict) -> FailureRecord:
        return FailureRecord.from_dict(d)

    def record(self, incident: str, outcome: str = "") -> FailureRecord:
        with self._lock:
            rec = FailureRecord(
                id=f"fm-{len(self._rows):04d}",
                signature=signature(incident),
                incident=incident,
                outcome=outcome,
                created=time.time(),
            )
            self._rows.append(rec)
            self._write_body(rec.id, incident)
            self._flush()
            return rec

    def match(self, text: str) -> list[FailureRecord]:
        sig = signature(text)
        with self._lock:
            return [r for r in self._rows if r.signature == sig]

    def records(self) -> list[FailureRecord]:
        with self._lock:
            return list(self._rows)


class QuarantineStore(_DirStore):
    def __init__(self, root: str | Path | None = None) -> None:
        super().__init__(root)
        self._payloads: dict[str, object] = {}

    def _row_from(self, d: dict) -> QuarantineEntry:
        return QuarantineEntry.from_dict(d)

    def hold(self, payload, origin: str = "", reason: str = "") -> QuarantineEntry:
        with self._lock:
            entry = QuarantineEntry(
                id=f"q-{len(self._rows):04d}",
                digest=content_digest(payload),
                origin=origin,
                reason=reason,
                state=HELD,
                created=time.time(),
            )
            self._rows.append(entry)
            self._payloads[entry.id] = payload
            self._write_body(entry.id, payload)
            self._flush()
            return entry

    def _transition(self, entry_id: str, state: str) -> QuarantineEntry:
        with self._lock:
            for i, row in enumerate(self._rows):
                if row.id == entry_id:
                    if row.state != HELD:
                        raise StoreUnavailableError(
                            f"entry {entry_id} is {row.state}, not held"
                        )
                    updated = QuarantineEntry(
                        row.id, row.digest, row.origin, row.reason, state, row.created
                    )
                    self._rows[i] = updated
                    if state == PURGED:
                        self._payloads.pop(entry_id, None)
                        if self._root is not None:
                            body = self._root / f"{entry_id}.json"
                            try:
                                body.unlink(missing_ok=True)
                            except OSError as exc:
                                raise StoreUnavailableError(str(exc)) from exc
                    self._flush()
                    return updated
            raise KeyError(entry_id)

    def release(self, entry_id: str) -> QuarantineEntry:
        return self._transition(entry_id, RELEASED)

    def purge(self, entry_id: str) -> QuarantineEntry:
        return self._transition(entry_id, PURGED)

    def is_held(self, payload) -> bool:
        digest = content_digest(payload)
        with self._lock:
            return any(r.digest == digest and r.state == HELD for r in self._rows)

    def entries(self, state: str | None = None) -> list[QuarantineEntry]:
        with self._lock:
            if state is None:
                return list(self._rows)
            return [r for r in self._rows if r.state == state]

    def payload_of(self, entry_id: str):
        with self._lock:
            if entry_id in self._payloads:
                return self._payloads[entry_id]
        if self._root is not None:
            body = self._root / f"{entry_id}.json"
            try:
                return json.loads(body.read_text())["payload"]
            except (OSError, ValueError, KeyError) as exc:
                raise StoreUnavailableError(f"payload missing for {entry_id}") from exc
        raise KeyError(entry_id)
