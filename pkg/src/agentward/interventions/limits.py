"""Rate and volume gating for repeated tool calls.

rate_gate is pure: callers supply the observed window stats and the limits,
and get back exactly one of admit, defer, or chunk. CallWindow is the small
tracker the runtime uses to produce those stats.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from ..errors import InvalidConfigError

ADMIT = "admit"
DEFER = "defer"
CHUNK = "chunk"


@dataclass(frozen=True)
class GateDecision:
    kind: str
    plan: tuple[str, ...] = ()
    rationale: str = ""


def chunk_plan(payload: str, limit: int) -> tuple[str, ...]:
    """Split payload into consecutive segments of at most limit characters.

    Segments concatenate back to the exact original payload.
    """
    if limit <= 0:
        raise InvalidConfigError("chunk limit must be positive")
    if not payload:
        return ()
    return tuple(payload[i : i + limit] for i in range(0, len(payload), limit))


def rate_gate(
    caller: str,
    calls_in_window: int,
    payload: str,
    max_calls: int,
    max_input: int,
) -> GateDecision:
    if max_calls <= 0 or max_input <= 0:
        raise InvalidConfigError("rate limits must be positive")
    if calls_in_window < 0:
        raise InvalidConfigError("negative call count")
    if calls_in_window >= max_calls:
        return GateDecision(
            DEFER, rationale=f"{caller}: {calls_in_window} calls in window, limit {max_calls}"
        )
    if len(payload) > max_input:
        plan = chunk_plan(payload, max_input)
        return GateDecision(
            CHUNK,
            plan=plan,
            rationale=f"{caller}: input of {len(payload)} exceeds {max_input}, "
            f"{len(plan)} segments",
        )
    return GateDecision(ADMIT)


class CallWindow:
    """Sliding window of call timestamps per caller."""

    def __init__(self, window: float = 60.0, clock=time.monotonic) -> None:
        if window <= 0:
            raise InvalidConfigError("window must be positive")
        self.window = window
        self._clock = clock
        self._calls: dict[str, deque] = {}

    def note(self, caller: str) -> None:
        self._calls.setdefault(caller, deque()).append(self._clock())

    def count(self, caller: str) -> int:
        now = self._clock()
        q = self._calls.get(caller)
        if not q:
            return 0
        while q and now - q[0] > self.window:
            q.popleft()
        return len(q)
