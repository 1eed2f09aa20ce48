"""Shared fixtures: a small mediated pipeline used across the suite."""

from __future__ import annotations

import pytest

from agentward.graph.model import Edge, Graph, NodeKind, NodeSpec, Trigger, build_graph
from agentward.graph.runtime import ExecutionState
from agentward.verdicts import Decision, Severity, Verdict


def enforcement_node(node_id: str, behavior: str, resources=("stop", "log_event")) -> NodeSpec:
    return NodeSpec(
        id=node_id,
        kind=NodeKind.ENFORCEMENT,
        trigger=Trigger(name=f"check_{node_id}"),
        task=f"screen traffic bound for downstream of {node_id}",
        behavior=behavior,
        resources=tuple(resources),
    )


def functional_node(node_id: str, behavior: str) -> NodeSpec:
    return NodeSpec(
        id=node_id,
        kind=NodeKind.FUNCTIONAL,
        trigger=Trigger(name=f"run_{node_id}"),
        task=f"do the {node_id} work",
        behavior=behavior,
    )


def pipeline_graph() -> Graph:
    """intake_guard -> summarizer -> pii_guard -> sender, both pairs wired."""
    nodes = [
        enforcement_node("intake_guard", behavior="always_pass"),
        functional_node("summarizer", behavior="summarize"),
        enforcement_node(
            "pii_guard", behavior="pii_check", resources=("stop", "log_event", "user_confirm")
        ),
        functional_node("sender", behavior="send"),
    ]
    edges = [
        Edge("intake_guard", "summarizer"),
        Edge("summarizer", "pii_guard"),
        Edge("pii_guard", "sender"),
    ]
    pairs = {"summarizer": "intake_guard", "sender": "pii_guard"}
    return build_graph(nodes, edges, pairs)


def passing_behaviors() -> dict:
    def always_pass(value, state: ExecutionState):
        return Decision(verdict=Verdict.PASS, rationale="clean input")

    def summarize(value, state: ExecutionState):
        return f"summary({value})"

    def pii_check(value, state: ExecutionState):
        return Decision(verdict=Verdict.PASS, rationale="no personal data found")

    def send(value, state: ExecutionState):
        state.set("sent", value)
        return f"sent:{value}"

    return {
        "always_pass": always_pass,
        "summarize": summarize,
        "pii_check": pii_check,
        "send": send,
    }


@pytest.fixture
def graph() -> Graph:
    return pipeline_graph()


@pytest.fixture
def behaviors() -> dict:
    return passing_behaviors()


def block_decision(rationale: str = "policy hit") -> Decision:
    return Decision(verdict=Verdict.BLOCK, severity=Severity.HIGH, rationale=rationale)


def review_decision(rationale: str = "needs a human") -> Decision:
    return Decision(verdict=Verdict.REVIEW, severity=Severity.MEDIUM, rationale=rationale)
