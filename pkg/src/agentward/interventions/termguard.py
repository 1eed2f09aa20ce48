"""Detects actions that would sever their own control channel.

An action whose effect set (processes or services it stops, restarts, or
kills) intersects the process ancestry of the channel supervising it cannot
be confirmed or rolled back once it lands: killing the parent takes the
reviewer down with it. Those actions must run from a decoupled context
(another session, a scheduler) instead of inline.
"""

from __future__ import annotations

from dataclasses import dataclass

SAFE = "safe"
REQUIRES_DECOUPLED_CONTEXT = "requires_decoupled_context"


@dataclass(frozen=True)
class ControlChannel:
    """Where approvals for this workflow arrive.

    process_chain lists ancestry from root to leaf, e.g.
    ("init", "gateway", "agent-session").
    """

    id: str
    process_chain: tuple[str, ...] = ()


def self_termination_guard(effect_set, channel: ControlChannel) -> str:
    effects = {str(e) for e in effect_set}
    if not effects:
        return SAFE
    if effects & set(channel.process_chain):
        return REQUIRES_DECOUPLED_CONTEXT
    return SAFE


def remediation_note(effect_set, channel: ControlChannel) -> str:
    hit = sorted({str(e) for e in effect_set} & set(channel.process_chain))
    return (
        f"action would terminate {', '.join(hit)}, which hosts control channel "
        f"{channel.id}; run it from a decoupled context (separate session or "
        f"scheduled job) so the approval path survives"
    )
