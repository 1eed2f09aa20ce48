"""User confirmation channel. Unanswered requests always resolve to denial."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field


@dataclass(frozen=True)
class ConfirmationRequest:
    id: str
    prompt: str
    evidence: str = ""
    timeout: float = 600.0
    created: float = field(default_factory=time.time)

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("confirmation timeout must be positive")


class _Pending:
    def __init__(self) -> None:
        self.event = threading.Event()
        self.approved = False


class ConfirmChannel:
    """Blocking ask with asynchronous resolve.

    ask() parks the calling thread until resolve() answers or the request
    times out. Timeout means denial; there is no path to an implicit yes.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._pending: dict[str, _Pending] = {}
        self._log: list[tuple[ConfirmationRequest, bool]] = []
        self._counter = 0

    def next_id(self) -> str:
        with self._lock:
            self._counter += 1
            return f"cfm-{self._counter:04d}"

    def pending(self) -> list[str]:
        with self._lock:
            return list(self._pending)

    def ask(self, request: ConfirmationRequest) -> bool:
        slot = _Pending()
        with self._lock:
            self._pending[request.id] = slot
        answered = slot.event.wait(request.timeout)
        with self._lock:
            self._pending.pop(request.id, None)
            approved = slot.approved if answered else False
            self._log.append((request, approved))
        return approved

    def resolve(self, request_id: str, approve: bool) -> bool:
        """Answer a pending request. Returns False if nothing was waiting."""
        with self._lock:
            slot = self._pending.get(request_id)
            if slot is None:
                return False
            slot.approved = bool(approve)
        slot.event.set()
        return True

    def history(self) -> list[tuple[ConfirmationRequest, bool]]:
        with self._lock:
            return list(self._log)


class ScriptedChannel:
    """Answers from a fixed mapping; absent prompt means denial."""

    def __init__(self, answers: dict[str, bool] | None = None, default: bool | None = None):
        self.answers = dict(answers or {})
        self.default = default
        self.asked: list[ConfirmationRequest] = []

    def ask(self, request: ConfirmationRequest) -> bool:
        self.asked.append(request)
        if request.prompt in self.answers:
            return self.answers[request.prompt]
        if self.default is None:
            return False
        return self.default
