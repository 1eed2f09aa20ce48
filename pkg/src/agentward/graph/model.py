"""Execution-graph model: nodes, edges, pairing, and validation.

A workflow is a directed graph of functional nodes (domain work) and
enforcement nodes (safety checks). Construction rejects any graph in which a
functional node lacks an inbound edge from its paired enforcement node; the
runtime (see :mod:`agentward.graph.runtime`) re-enforces the same guarantee
dynamically on every trajectory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from ..errors import (
    DanglingEdgeError,
    DuplicateIdError,
    InvalidNodeError,
    UnmediatedFunctionalNodeError,
)

#: The closed set of intervention resources enforcement nodes may declare.
INTERVENTION_RESOURCES = frozenset(
    {
        "stop",
        "user_confirm",
        "log_event",
        "quarantine",
        "modify_output",
        "failure_memory",
        "cli_plan",
    }
)


class NodeKind(str, Enum):
    FUNCTIONAL = "functional"
    ENFORCEMENT = "enforcement"


@dataclass(frozen=True)
class Trigger:
    """Activation descriptor: name, capability tags, and condition text."""

    name: str
    capabilities: tuple[str, ...] = ()
    condition: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "capabilities": list(self.capabilities),
            "condition": self.condition,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Trigger":
        return cls(
            name=d["name"],
            capabilities=tuple(d.get("capabilities", ())),
            condition=d.get("condition", ""),
        )


@dataclass(frozen=True)
class NodeSpec:
    """One graph node.

    ``behavior`` names the executable binding the host registered for this
    node's task; the task text itself is opaque to the engine.
    """

    id: str
    kind: NodeKind
    trigger: Trigger
    task: str = ""
    behavior: str = "identity"
    resources: tuple[str, ...] = ()

    def validate(self) -> None:
        if self.kind is NodeKind.FUNCTIONAL:
            used = set(self.resources) & INTERVENTION_RESOURCES
            if used:
                raise InvalidNodeError(
                    f"functional node {self.id!r} references intervention "
                    f"resources: {sorted(used)}"
                )
        else:
            unknown = set(self.resources) - INTERVENTION_RESOURCES
            if unknown:
                raise InvalidNodeError(
                    f"enforcement node {self.id!r} references unregistered "
                    f"resources: {sorted(unknown)}"
                )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "trigger": self.trigger.to_dict(),
            "task": self.task,
            "behavior": self.behavior,
            "resources": list(self.resources),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NodeSpec":
        return cls(
            id=d["id"],
            kind=NodeKind(d["kind"]),
            trigger=Trigger.from_dict(d["trigger"]),
            task=d.get("task", ""),
            behavior=d.get("behavior", "identity"),
            resources=tuple(d.get("resources", ())),
        )


@dataclass(frozen=True)
class Edge:
    """Directed control/data flow; ``transform`` names a registered mapping
    from the source's output to the destination's input (identity when absent)."""

    src: str
    dst: str
    transform: str = "identity"

    def to_dict(self) -> dict:
        return {"src": self.src, "dst": self.dst, "transform": self.transform}

    @classmethod
    def from_dict(cls, d: dict) -> "Edge":
        return cls(src=d["src"], dst=d["dst"], transform=d.get("transform", "identity"))


@dataclass(frozen=True)
class Graph:
    nodes: dict[str, NodeSpec]
    edges: tuple[Edge, ...]
    pairs: dict[str, str] = field(default_factory=dict)

    def node(self, node_id: str) -> NodeSpec:
        return self.nodes[node_id]

    def guard_of(self, functional_id: str) -> str | None:
        return self.pairs.get(functional_id)

    def functional_ids(self) -> list[str]:
        return [n.id for n in self.nodes.values() if n.kind is NodeKind.FUNCTIONAL]

    def enforcement_ids(self) -> list[str]:
        return [n.id for n in self.nodes.values() if n.kind is NodeKind.ENFORCEMENT]

    def predecessors(self, node_id: str) -> list[Edge]:
        return [e for e in self.edges if e.dst == node_id]

    def successors(self, node_id: str) -> list[Edge]:
        return [e for e in self.edges if e.src == node_id]

    def to_dict(self) -> dict:
        return {
            "nodes": [n.to_dict() for n in self.nodes.values()],
            "edges": [e.to_dict() for e in self.edges],
            "pairs": dict(self.pairs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Graph":
        nodes = [NodeSpec.from_dict(n) for n in d.get("nodes", ())]
        edges = [Edge.from_dict(e) for e in d.get("edges", ())]
        return build_graph(nodes, edges, d.get("pairs", {}))


def build_graph(
    nodes: list[NodeSpec],
    edges: list[Edge],
    pairs: dict[str, str],
) -> Graph:
    """Validate and assemble a graph.

    Rejects duplicate ids, dangling edges, self-loops, resource misuse, and
    any functional node without an inbound edge from its paired enforcement
    node (the static form of the mediation invariant).
    """
    by_id: dict[str, NodeSpec] = {}
    for node in nodes:
        if node.id in by_id:
            raise DuplicateIdError(node.id)
        node.validate()
        by_id[node.id] = node

    for edge in edges:
        if edge.src not in by_id or edge.dst not in by_id:
            raise DanglingEdgeError(edge.src, edge.dst)
        if edge.src == edge.dst:
            raise DanglingEdgeError(edge.src, edge.dst)

    edge_set = {(e.src, e.dst) for e in edges}
    for node in by_id.values():
        if node.kind is not NodeKind.FUNCTIONAL:
            continue
        guard_id = pairs.get(node.id)
        if guard_id is None:
            raise UnmediatedFunctionalNodeError(node.id, "no pair-map entry")
        guard = by_id.get(guard_id)
        if guard is None:
            raise UnmediatedFunctionalNodeError(node.id, f"pair {guard_id!r} not in graph")
        if guard.kind is not NodeKind.ENFORCEMENT:
            raise UnmediatedFunctionalNodeError(node.id, f"pair {guard_id!r} is not enforcement")
        if (guard_id, node.id) not in edge_set:
            raise UnmediatedFunctionalNodeError(node.id, f"no edge {guard_id!r} -> {node.id!r}")

    for functional_id in pairs:
        if functional_id not in by_id:
            raise DanglingEdgeError(functional_id, pairs[functional_id])

    return Graph(nodes=by_id, edges=tuple(edges), pairs=dict(pairs))


# -- graph definition files ---------------------------------------------------
#
# The on-disk format is a JSON document with "nodes", "edges", and "pairs"
# keys; see docs/formats.md for the schema. load/save round-trip exactly.


def load_graph(path: str | Path) -> Graph:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return Graph.from_dict(data)


def save_graph(graph: Graph, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(graph.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
