"""Property tests for engine invariants."""

from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from agentward.graph.model import Edge, build_graph
from agentward.graph.runtime import run_workflow, verify_trajectory
from agentward.verdicts import Decision, Severity, Verdict

from conftest import enforcement_node, functional_node

# every functional node paired and fed by its own gate, chained in a line,
# with each gate's verdict drawn independently
verdict_strategy = st.sampled_from([Verdict.PASS, Verdict.BLOCK, Verdict.REVIEW])


def chain_graph(width: int):
    nodes, edges, pairs = [], [], {}
    prev = None
    for i in range(width):
        gate, worker = f"gate{i}", f"worker{i}"
        nodes.append(enforcement_node(gate, behavior=gate))
        nodes.append(functional_node(worker, behavior="work"))
        edges.append(Edge(gate, worker))
        pairs[worker] = gate
        if prev is not None:
            edges.append(Edge(prev, gate))
        prev = worker
    return build_graph(nodes, edges, pairs)


@given(
    verdicts=st.lists(verdict_strategy, min_size=1, max_size=6),
    approve=st.booleans(),
    data=st.text(max_size=20),
)
@settings(max_examples=200, deadline=None)
def test_mediation_invariant_holds_for_any_verdict_mix(verdicts, approve, data):
    g = chain_graph(len(verdicts))
    behaviors = {"work": lambda v, s: f"out({v})"}
    for i, verdict in enumerate(verdicts):
        severity = Severity.HIGH if verdict is Verdict.BLOCK else Severity.LOW

        def gate_behavior(value, state, _v=verdict, _s=severity):
            return Decision(verdict=_v, severity=_s)

        behaviors[f"gate{i}"] = gate_behavior

    t = run_workflow(g, behaviors, prompt=data, resolver=lambda r: approve)

    # 1. no functional step ever precedes its authorizing guard step
    assert verify_trajectory(g, t) == []

    # 2. blocked nodes never appear in the executed order
    executed = set(t.node_order())
    assert not (t.blocked & executed & set(g.functional_ids())) or all(
        s.kind.value != "functional" for s in t.steps if s.node_id in t.blocked
    )

    # 3. a block or denied review stops the chain right there
    ran_workers = [s.node_id for s in t.functional_steps()]
    for i, verdict in enumerate(verdicts):
        stops = verdict is Verdict.BLOCK or (verdict is Verdict.REVIEW and not approve)
        if stops:
            assert f"worker{i}" not in ran_workers
            for j in range(i + 1, len(verdicts)):
                assert f"worker{j}" not in ran_workers
            break


@given(budget=st.integers(min_value=0, max_value=12))
@settings(max_examples=60, deadline=None)
def test_budget_is_never_exceeded(budget):
    g = chain_graph(4)
    behaviors = {"work": lambda v, s: v}
    for i in range(4):
        behaviors[f"gate{i}"] = lambda v, s: Decision(verdict=Verdict.PASS)
    t = run_workflow(g, behaviors, prompt="p", budget=budget)
    assert len(t.steps) <= budget
    if len(t.steps) < 8:  # the full chain takes 8 steps
        assert t.terminal == "budget_exhausted"
    else:
        assert t.terminal == "completed"
