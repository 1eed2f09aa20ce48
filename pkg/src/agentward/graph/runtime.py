"""Mediated execution of a workflow graph.

The runner walks the graph step by step and refuses to execute any functional
node until its paired enforcement node has authorized the pending input in
this run. Authorization happens either in-path (the guard sits on an edge
ahead of the functional node) or by injection (the runner forces the guard to
run when a functional activation arrives unauthorized). Every step, guard
steps included, lands in the trajectory.

Enforcement failures never grant access: a guard behavior that raises maps to
a blocked outcome with the error preserved in the rationale.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Mapping

from ..errors import BehaviorFailure, UnmediatedFunctionalNodeError
from ..verdicts import Decision, Severity, Verdict
from .model import Graph, NodeKind, NodeSpec

DEFAULT_BUDGET = 64

# terminal markers
TERMINAL_COMPLETED = "completed"
TERMINAL_BUDGET = "budget_exhausted"
TERMINAL_STOPPED = "stopped"
TERMINAL_FAILED = "failed"


class ExecutionState:
    """Shared key-value state; every write bumps the version counter."""

    def __init__(self, initial: Mapping[str, Any] | None = None) -> None:
        self._data: dict[str, Any] = dict(initial or {})
        self._version = 0

    @property
    def version(self) -> int:
        return self._version

    def get(self, key: str, default: Any = None) -> Any:
        return self._data.get(key, default)

    def set(self, key: str, value: Any) -> None:
        self._data[key] = value
        self._version += 1

    def snapshot(self) -> dict[str, Any]:
        return dict(self._data)


class OutcomeKind(str, Enum):
    PROCEED = "proceed"
    PROCEED_MODIFIED = "proceed_modified"
    DEFERRED = "deferred"
    BLOCKED = "blocked"


@dataclass(frozen=True)
class MediationOutcome:
    """What an enforcement step allows: the authorized value rides along for
    proceed outcomes, the ticket id for deferred ones."""

    kind: OutcomeKind
    decision: Decision
    value: Any = None
    ticket_id: str | None = None

    @property
    def authorizes(self) -> bool:
        return self.kind in (OutcomeKind.PROCEED, OutcomeKind.PROCEED_MODIFIED)


@dataclass(frozen=True)
class ReviewRequest:
    """Handed to the resolver when a guard returns a review verdict."""

    ticket_id: str
    node_id: str
    guard_id: str
    value: Any
    decision: Decision


@dataclass(frozen=True)
class TrajectoryStep:
    index: int
    node_id: str
    kind: NodeKind
    input: Any
    output: Any
    state_version: int
    decision: Decision | None = None
    authorized_by: str | None = None
    resolution: str | None = None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "node_id": self.node_id,
            "kind": self.kind.value,
            "input": self.input,
            "output": self.output,
            "state_version": self.state_version,
            "decision": self.decision.to_dict() if self.decision else None,
            "authorized_by": self.authorized_by,
            "resolution": self.resolution,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrajectoryStep":
        return cls(
            index=d["index"],
            node_id=d["node_id"],
            kind=NodeKind(d["kind"]),
            input=d.get("input"),
            output=d.get("output"),
            state_version=d.get("state_version", 0),
            decision=Decision.from_dict(d["decision"]) if d.get("decision") else None,
            authorized_by=d.get("authorized_by"),
            resolution=d.get("resolution"),
        )


@dataclass
class Trajectory:
    prompt: str = ""
    steps: list[TrajectoryStep] = field(default_factory=list)
    terminal: str = TERMINAL_COMPLETED
    blocked: set[str] = field(default_factory=set)

    def append(self, step: TrajectoryStep) -> None:
        self.steps.append(step)

    def node_order(self) -> list[str]:
        return [s.node_id for s in self.steps]

    def functional_steps(self) -> list[TrajectoryStep]:
        return [s for s in self.steps if s.kind is NodeKind.FUNCTIONAL]

    def enforcement_steps(self) -> list[TrajectoryStep]:
        return [s for s in self.steps if s.kind is NodeKind.ENFORCEMENT]

    def final_output(self) -> Any:
        for step in reversed(self.steps):
            if step.kind is NodeKind.FUNCTIONAL:
                return step.output
        return None


# -- trajectory files ---------------------------------------------------------
#
# JSONL: a header record, one record per step, a trailing terminal record.
# Values survive the round trip when they are JSON-representable; anything
# else is stored as its repr.


def save_trajectory(trajectory: Trajectory, path: str | Path) -> None:
    lines = [json.dumps({"type": "header", "prompt": trajectory.prompt}, default=repr)]
    for step in trajectory.steps:
        lines.append(json.dumps({"type": "step", **step.to_dict()}, default=repr))
    lines.append(
        json.dumps(
            {
                "type": "terminal",
                "reason": trajectory.terminal,
                "blocked": sorted(trajectory.blocked),
            }
        )
    )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_trajectory(path: str | Path) -> Trajectory:
    trajectory = Trajectory()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        rtype = record.pop("type", "step")
        if rtype == "header":
            trajectory.prompt = record.get("prompt", "")
        elif rtype == "terminal":
            trajectory.terminal = record.get("reason", TERMINAL_COMPLETED)
            trajectory.blocked = set(record.get("blocked", ()))
        else:
            trajectory.append(TrajectoryStep.from_dict(record))
    return trajectory


# -- mediation ----------------------------------------------------------------


def _fail_closed(guard_id: str, exc: Exception) -> MediationOutcome:
    decision = Decision(
        verdict=Verdict.BLOCK,
        severity=Severity.HIGH,
        rationale=f"enforcement failure in {guard_id}: {exc}",
        provenance=("fail_closed",),
    )
    return MediationOutcome(kind=OutcomeKind.BLOCKED, decision=decision)


def mediate(
    guard: NodeSpec,
    behavior: Callable[[Any, ExecutionState], Any],
    value: Any,
    state: ExecutionState,
    *,
    quarantine: Any = None,
    ticket_id: str = "",
) -> MediationOutcome:
    """Run one enforcement behavior over a pending value.

    The behavior returns a Decision, or a (Decision, replacement) pair when
    it rewrites the value. Review verdicts come back deferred; the caller
    resolves the ticket. Exceptions block.
    """
    if quarantine is not None:
        try:
            held = quarantine.is_held(value)
        except Exception as exc:
            return _fail_closed(guard.id, exc)
        if held:
            decision = Decision(
                verdict=Verdict.BLOCK,
                severity=Severity.HIGH,
                rationale="pending input is held in quarantine",
                provenance=("quarantine",),
            )
            return MediationOutcome(kind=OutcomeKind.BLOCKED, decision=decision)

    try:
        result = behavior(value, state)
    except Exception as exc:
        return _fail_closed(guard.id, exc)

    if isinstance(result, tuple):
        decision, out_value = result
    else:
        decision, out_value = result, value
    if not isinstance(decision, Decision):
        return _fail_closed(
            guard.id, TypeError(f"behavior returned {type(result).__name__}, not a Decision")
        )

    if decision.verdict is Verdict.BLOCK:
        return MediationOutcome(kind=OutcomeKind.BLOCKED, decision=decision)
    if decision.verdict is Verdict.REVIEW:
        return MediationOutcome(
            kind=OutcomeKind.DEFERRED, decision=decision, value=out_value, ticket_id=ticket_id
        )
    kind = OutcomeKind.PROCEED_MODIFIED if out_value != value else OutcomeKind.PROCEED
    return MediationOutcome(kind=kind, decision=decision, value=out_value)


def execute_node(
    node: NodeSpec,
    behavior: Callable[[Any, ExecutionState], Any],
    value: Any,
    state: ExecutionState,
) -> Any:
    try:
        return behavior(value, state)
    except Exception as exc:
        raise BehaviorFailure(f"functional node {node.id!r} failed: {exc}") from exc


# -- scheduling ---------------------------------------------------------------


@dataclass
class Activation:
    node_id: str
    value: Any
    # set when an injected guard rewrote the value before authorizing it
    override: Any = None
    has_override: bool = False


def select_next(graph: Graph, frontier: list[Activation]) -> int:
    """Pick the next activation: enforcement first, FIFO otherwise."""
    for i, activation in enumerate(frontier):
        if graph.node(activation.node_id).kind is NodeKind.ENFORCEMENT:
            return i
    return 0


def _apply_transform(
    transforms: Mapping[str, Callable[[Any], Any]], name: str, value: Any
) -> Any:
    fn = transforms.get(name)
    if fn is None:
        if name == "identity":
            return value
        raise KeyError(f"no transform registered under {name!r}")
    return fn(value)


def run_workflow(
    graph: Graph,
    behaviors: Mapping[str, Callable[[Any, ExecutionState], Any]],
    prompt: Any = "",
    *,
    state: ExecutionState | None = None,
    budget: int = DEFAULT_BUDGET,
    resolver: Callable[[ReviewRequest], bool] | None = None,
    transforms: Mapping[str, Callable[[Any], Any]] | None = None,
    quarantine: Any = None,
    stop_flag: Any = None,
    on_event: Callable[[dict], None] | None = None,
) -> Trajectory:
    """Execute a graph under mediation and return the full trajectory.

    Roots (nodes with no inbound edge) activate on the prompt; completion of a
    node activates each successor with the edge-transformed output. A guard's
    pass grants a one-shot authorization to every functional node paired with
    it; a block puts the paired nodes on the permanent blocked list. Review
    verdicts go through ``resolver`` and deny when none is registered.

    ``budget`` caps recorded steps; hitting it marks the trajectory
    budget_exhausted. ``stop_flag`` (anything with is_set) aborts between
    steps.
    """
    state = state if state is not None else ExecutionState()
    transforms = dict(transforms or {})
    transforms.setdefault("identity", lambda v: v)
    trajectory = Trajectory(prompt=prompt if isinstance(prompt, str) else repr(prompt))
    tickets = itertools.count(1)

    guarded_by: dict[str, list[str]] = {}
    for fid, gid in graph.pairs.items():
        guarded_by.setdefault(gid, []).append(fid)

    # one-shot authorization tokens: functional id -> guard activation record
    tokens: dict[str, dict] = {}
    frontier: list[Activation] = [
        Activation(node_id=n.id, value=prompt)
        for n in graph.nodes.values()
        if not graph.predecessors(n.id)
    ]

    def emit(event: dict) -> None:
        if on_event is not None:
            on_event(event)

    def record(step: TrajectoryStep) -> None:
        trajectory.append(step)

    def behavior_for(node: NodeSpec) -> Callable[[Any, ExecutionState], Any]:
        fn = behaviors.get(node.behavior)
        if fn is None:
            raise BehaviorFailure(
                f"node {node.id!r}: no behavior registered under {node.behavior!r}"
            )
        return fn

    def resolve_outcome(
        node: NodeSpec, outcome: MediationOutcome, value: Any
    ) -> tuple[MediationOutcome, str | None]:
        """Settle a deferred outcome through the resolver; fail-closed."""
        if outcome.kind is not OutcomeKind.DEFERRED:
            return outcome, None
        request = ReviewRequest(
            ticket_id=outcome.ticket_id or "",
            node_id=node.id,
            guard_id=node.id,
            value=value,
            decision=outcome.decision,
        )
        if resolver is None:
            approved = False
        else:
            try:
                approved = bool(resolver(request))
            except Exception:
                approved = False
        if approved:
            kind = (
                OutcomeKind.PROCEED_MODIFIED
                if outcome.value != value
                else OutcomeKind.PROCEED
            )
            return (
                MediationOutcome(
                    kind=kind,
                    decision=outcome.decision,
                    value=outcome.value,
                    ticket_id=outcome.ticket_id,
                ),
                "approved",
            )
        return (
            MediationOutcome(
                kind=OutcomeKind.BLOCKED,
                decision=outcome.decision,
                ticket_id=outcome.ticket_id,
            ),
            "denied",
        )

    def run_guard(node: NodeSpec, value: Any, *, injected: bool = False) -> MediationOutcome:
        """Mediate, settle any review, record the step, update tokens.

        A pass authorizes specific values, not the node in perpetuity: a
        scheduled guard authorizes what its outgoing edges will deliver, an
        injected guard authorizes the value it was handed.
        """
        try:
            behavior = behavior_for(node)
        except BehaviorFailure as exc:
            outcome = _fail_closed(node.id, exc)
        else:
            outcome = mediate(
                node,
                behavior,
                value,
                state,
                quarantine=quarantine,
                ticket_id=f"tkt-{next(tickets):04d}",
            )
        outcome, resolution = resolve_outcome(node, outcome, value)

        record(
            TrajectoryStep(
                index=len(trajectory.steps),
                node_id=node.id,
                kind=NodeKind.ENFORCEMENT,
                input=value,
                output=outcome.value if outcome.authorizes else None,
                state_version=state.version,
                decision=outcome.decision,
                resolution=resolution,
            )
        )
        emit(
            {
                "type": "mediation",
                "node": node.id,
                "verdict": outcome.decision.verdict.value,
                "outcome": outcome.kind.value,
                "ticket": outcome.ticket_id,
            }
        )

        for fid in guarded_by.get(node.id, ()):
            if not outcome.authorizes:
                trajectory.blocked.add(fid)
                tokens.pop(fid, None)
            elif injected:
                tokens[fid] = {"guard": node.id, "kind": "injected", "value": outcome.value}
            else:
                delivered = [
                    _apply_transform(transforms, e.transform, outcome.value)
                    for e in graph.successors(node.id)
                    if e.dst == fid
                ]
                tokens[fid] = {"guard": node.id, "kind": "scheduled", "delivered": delivered}
        return outcome

    while frontier:
        if stop_flag is not None and stop_flag.is_set():
            trajectory.terminal = TERMINAL_STOPPED
            emit({"type": "terminal", "reason": trajectory.terminal})
            return trajectory
        if len(trajectory.steps) >= budget:
            trajectory.terminal = TERMINAL_BUDGET
            emit({"type": "terminal", "reason": trajectory.terminal})
            return trajectory

        activation = frontier.pop(select_next(graph, frontier))
        node = graph.node(activation.node_id)

        if node.id in trajectory.blocked:
            continue

        if node.kind is NodeKind.ENFORCEMENT:
            outcome = run_guard(node, activation.value)
            if outcome.authorizes:
                for edge in graph.successors(node.id):
                    frontier.append(
                        Activation(
                            node_id=edge.dst,
                            value=_apply_transform(transforms, edge.transform, outcome.value),
                        )
                    )
            continue

        # functional node: demand an authorization covering this exact value
        token = tokens.get(node.id)
        covered = token is not None and (
            token["kind"] == "injected"
            or any(activation.value == d for d in token["delivered"])
        )
        if not covered:
            guard_id = graph.guard_of(node.id)
            if guard_id is None:
                # unreachable for graphs built through build_graph; refuse anyway
                raise UnmediatedFunctionalNodeError(node.id, "no paired enforcement node")
            if len(trajectory.steps) + 1 >= budget and budget > 0:
                # the injected guard consumes the last step; the functional
                # node would overflow, so stop before granting authorization
                trajectory.terminal = TERMINAL_BUDGET
                emit({"type": "terminal", "reason": trajectory.terminal})
                return trajectory
            outcome = run_guard(graph.node(guard_id), activation.value, injected=True)
            if not outcome.authorizes:
                continue
            token = tokens.get(node.id)
            if token is None:
                continue

        tokens.pop(node.id, None)
        input_value = token["value"] if token["kind"] == "injected" else activation.value
        try:
            output = execute_node(node, behavior_for(node), input_value, state)
        except BehaviorFailure as exc:
            trajectory.terminal = TERMINAL_FAILED
            emit({"type": "terminal", "reason": trajectory.terminal, "error": str(exc)})
            exc.trajectory = trajectory  # type: ignore[attr-defined]
            raise
        record(
            TrajectoryStep(
                index=len(trajectory.steps),
                node_id=node.id,
                kind=NodeKind.FUNCTIONAL,
                input=input_value,
                output=output,
                state_version=state.version,
                authorized_by=token["guard"],
            )
        )
        emit({"type": "execution", "node": node.id})
        for edge in graph.successors(node.id):
            frontier.append(
                Activation(
                    node_id=edge.dst,
                    value=_apply_transform(transforms, edge.transform, output),
                )
            )

    trajectory.terminal = TERMINAL_COMPLETED
    emit({"type": "terminal", "reason": trajectory.terminal})
    return trajectory


# -- dynamic invariant check --------------------------------------------------


def verify_trajectory(graph: Graph, trajectory: Trajectory) -> list[str]:
    """Return mediation violations in a recorded trajectory (empty = clean).

    A functional step is authorized when an earlier step ran its paired
    enforcement node and that step's decision passed, or was a review that
    resolved approved.
    """
    violations: list[str] = []
    for step in trajectory.steps:
        if step.kind is not NodeKind.FUNCTIONAL:
            continue
        guard_id = graph.guard_of(step.node_id)
        if guard_id is None:
            violations.append(f"step {step.index}: {step.node_id} has no paired guard")
            continue
        earlier = [
            s
            for s in trajectory.steps[: step.index]
            if s.node_id == guard_id and s.decision is not None
        ]
        authorizing = [
            s
            for s in earlier
            if s.decision.verdict is Verdict.PASS
            or (s.decision.verdict is Verdict.REVIEW and s.resolution == "approved")
        ]
        if not authorizing:
            violations.append(
                f"step {step.index}: {step.node_id} executed without an earlier "
                f"authorizing step from {guard_id}"
            )
    return violations
