"""Command-line surface: exit codes, reports, interactivity, golden help."""

from __future__ import annotations

import http.client
import io
import json
import sys
from pathlib import Path

import pytest

from agentward.cli import (
    EXIT_BLOCK,
    EXIT_ERROR,
    EXIT_PASS,
    EXIT_REVIEW,
    EXIT_USAGE,
    builtin_behaviors,
    cli,
    dispatch,
)

REPO = Path(__file__).resolve().parents[1]
DEMO_GRAPH = REPO / "demo" / "pipeline.json"
GOLDEN_HELP = Path(__file__).parent / "data" / "cli_help.txt"

HELP_SECTIONS = [
    [],
    ["scan"],
    ["guard-code"],
    ["mediate"],
    ["review"],
    ["eval"],
    ["factory"],
    ["factory", "synth"],
    ["serve"],
]


def run_cli(capsys, *argv, stdin: str | None = None):
    old_stdin = sys.stdin
    if stdin is not None:
        sys.stdin = io.StringIO(stdin)
    try:
        code = dispatch(list(argv))
    finally:
        sys.stdin = old_stdin
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- scan ---------------------------------------------------------------------


def test_scan_poisoned_package_blocks(capsys):
    code, out, _ = run_cli(capsys, "scan", str(REPO / "demo" / "calculator_skill"))
    assert code == EXIT_BLOCK
    assert "verdict: BLOCK" in out
    assert "RemoteCodeExecution" in out
    assert "calculator.py:10" in out


def test_scan_clean_package_passes(capsys, tmp_path):
    pkg = tmp_path / "tidy_skill"
    pkg.mkdir()
    (pkg / "SKILL.md").write_text("# Tidy\n\nSorts a list of lines alphabetically.\n")
    (pkg / "tidy.py").write_text("def tidy(lines):\n    return sorted(lines)\n")
    code, out, _ = run_cli(capsys, "scan", str(pkg))
    assert code == EXIT_PASS
    assert "verdict: PASS" in out
    assert "findings: none" in out


def test_scan_missing_directory_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "scan", "no/such/dir")
    assert code == EXIT_USAGE
    assert "--help" in err


# -- guard-code ---------------------------------------------------------------


def test_guard_code_clean_seed_passes(capsys):
    code, out, _ = run_cli(
        capsys, "guard-code", str(REPO / "corpus" / "safe_exec" / "B01" / "script.py")
    )
    assert code == EXIT_PASS
    assert out.startswith("PASS")


def test_guard_code_exfil_seed_blocks(capsys):
    code, out, _ = run_cli(
        capsys, "guard-code", str(REPO / "corpus" / "safe_exec" / "M01" / "script.py")
    )
    assert code == EXIT_BLOCK
    assert out.startswith("BLOCK")


# -- mediate ------------------------------------------------------------------


def test_mediate_clean_prompt_completes(capsys):
    code, out, _ = run_cli(
        capsys, "mediate", "--graph", str(DEMO_GRAPH), "--prompt", "weekly digest"
    )
    assert code == EXIT_PASS
    assert "output: sent:summary(weekly digest)" in out
    assert "terminal: completed" in out


def test_mediate_review_denies_without_operator(capsys):
    code, out, _ = run_cli(
        capsys, "mediate", "--graph", str(DEMO_GRAPH), "--prompt", "mail ops@example.com"
    )
    assert code == EXIT_REVIEW
    assert "REVIEW [denied]" in out
    assert "blocked: sender" in out


def test_mediate_block_verdict_exits_3(capsys, tmp_path):
    data = json.loads(DEMO_GRAPH.read_text())
    for node in data["nodes"]:
        if node["id"] == "outbound_guard":
            node["behavior"] = "always_block"
    graph = tmp_path / "blocking.json"
    graph.write_text(json.dumps(data))
    code, out, _ = run_cli(capsys, "mediate", "--graph", str(graph), "--prompt", "x")
    assert code == EXIT_BLOCK
    assert "BLOCK" in out


def test_mediate_invalid_graph_exits_1_with_pairing_message(capsys, tmp_path):
    data = json.loads(DEMO_GRAPH.read_text())
    del data["pairs"]["sender"]
    graph = tmp_path / "broken.json"
    graph.write_text(json.dumps(data))
    code, _, err = run_cli(capsys, "mediate", "--graph", str(graph), "--prompt", "x")
    assert code == EXIT_ERROR
    assert "not mediated" in err


def test_mediate_garbage_graph_file_exits_1(capsys, tmp_path):
    graph = tmp_path / "garbage.json"
    graph.write_text("{not json")
    code, _, err = run_cli(capsys, "mediate", "--graph", str(graph))
    assert code == EXIT_ERROR
    assert "not valid JSON" in err


def test_mediate_unknown_behavior_is_usage_error(capsys, tmp_path):
    data = json.loads(DEMO_GRAPH.read_text())
    data["nodes"][1]["behavior"] = "frobnicate"
    graph = tmp_path / "unknown.json"
    graph.write_text(json.dumps(data))
    code, _, err = run_cli(capsys, "mediate", "--graph", str(graph))
    assert code == EXIT_USAGE
    assert "frobnicate" in err


# -- review -------------------------------------------------------------------


def test_review_approval_releases_the_step(capsys):
    code, out, _ = run_cli(
        capsys,
        "review",
        "--graph",
        str(DEMO_GRAPH),
        "--prompt",
        "mail ops@example.com",
        stdin="y\n",
    )
    assert code == EXIT_PASS
    assert "approve this step?" in out
    assert "REVIEW [approved]" in out
    assert "output: sent:summary(mail ops@example.com)" in out


def test_review_refusal_blocks_the_step(capsys):
    code, out, _ = run_cli(
        capsys,
        "review",
        "--graph",
        str(DEMO_GRAPH),
        "--prompt",
        "mail ops@example.com",
        stdin="n\n",
    )
    assert code == EXIT_REVIEW
    assert "REVIEW [denied]" in out
    assert "blocked: sender" in out


def test_review_end_of_input_denies(capsys):
    code, out, _ = run_cli(
        capsys,
        "review",
        "--graph",
        str(DEMO_GRAPH),
        "--prompt",
        "mail ops@example.com",
        stdin="",
    )
    assert code == EXIT_REVIEW
    assert "REVIEW [denied]" in out


@pytest.mark.parametrize(
    "assume, expected_code, marker",
    [("approve", EXIT_PASS, "auto-approve"), ("deny", EXIT_REVIEW, "auto-deny")],
)
def test_review_assume_answers_without_prompting(capsys, assume, expected_code, marker):
    code, out, _ = run_cli(
        capsys,
        "review",
        "--graph",
        str(DEMO_GRAPH),
        "--prompt",
        "mail ops@example.com",
        "--assume",
        assume,
    )
    assert code == expected_code
    assert marker in out
    assert "approve this step?" not in out


# -- eval ---------------------------------------------------------------------


def test_eval_skills_suite(capsys, tmp_path):
    csv_path = tmp_path / "skills.csv"
    code, out, _ = run_cli(
        capsys,
        "eval",
        "--suite",
        str(REPO / "suites" / "skills.jsonl"),
        "--domain",
        "skills",
        "--csv",
        str(csv_path),
    )
    assert code == EXIT_PASS
    assert "domain: skills" in out
    assert "accuracy: 100.0%" in out
    assert csv_path.read_text().startswith("section,key,total")


def test_eval_workspace_uses_explicit_ruleset(capsys):
    code, out, _ = run_cli(
        capsys,
        "eval",
        "--suite",
        str(REPO / "suites" / "workspace.jsonl"),
        "--domain",
        "workspace",
        "--ruleset",
        str(REPO / "rulesets" / "workspace.jsonl"),
    )
    assert code == EXIT_PASS
    assert "domain: workspace" in out
    assert "cases: 81" in out


def test_eval_workspace_without_ruleset_is_usage_error(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    suite = REPO / "suites" / "workspace.jsonl"
    code, _, err = run_cli(
        capsys, "eval", "--suite", str(suite), "--domain", "workspace"
    )
    assert code == EXIT_USAGE
    assert "--ruleset" in err


def test_eval_rejects_unknown_domain(capsys):
    code, _, err = run_cli(
        capsys,
        "eval",
        "--suite",
        str(REPO / "suites" / "skills.jsonl"),
        "--domain",
        "weather",
    )
    assert code == EXIT_USAGE
    assert "weather" in err


# -- factory ------------------------------------------------------------------


def test_factory_synth_prints_counterpart(capsys):
    code, out, _ = run_cli(capsys, "factory", "synth", str(REPO / "demo" / "email_sender.skill"))
    assert code == EXIT_PASS
    assert "email_sender_safe" in out
    assert "converged: yes" in out
    assert "Resources: stop, user_confirm, log_event" in out


def test_factory_synth_rejects_scan_target_format(capsys):
    code, _, err = run_cli(
        capsys, "factory", "synth", str(REPO / "demo" / "calculator_skill" / "SKILL.md")
    )
    assert code == EXIT_ERROR
    assert "Trigger" in err


# -- serve --------------------------------------------------------------------


def test_serve_starts_api_and_stops_cleanly(capsys, tmp_path, monkeypatch):
    import agentward.cli as cli_module

    probed = {}

    def probe_then_interrupt(server):
        host, port = server.address
        conn = http.client.HTTPConnection(host, port, timeout=5)
        conn.request("GET", "/v1/health")
        response = conn.getresponse()
        probed["status"] = response.status
        probed["body"] = json.loads(response.read())
        conn.close()
        raise KeyboardInterrupt

    monkeypatch.setattr(cli_module, "_wait_for_shutdown", probe_then_interrupt)
    code, out, _ = run_cli(
        capsys,
        "serve",
        "--port",
        "0",
        "--audit-file",
        str(tmp_path / "audit.jsonl"),
    )
    assert code == EXIT_PASS
    assert probed == {"status": 200, "body": {"ok": True, "version": "v1"}}
    assert "control api v1 on http://127.0.0.1:" in out
    assert "stopping" in out


# -- help and usage -----------------------------------------------------------


def render_help(capsys, monkeypatch) -> str:
    monkeypatch.setenv("COLUMNS", "120")
    chunks = []
    for path in HELP_SECTIONS:
        code = dispatch([*path, "--help"])
        assert code == 0
        chunks.append(capsys.readouterr().out.rstrip("\n"))
    return ("\n\n" + "=" * 78 + "\n\n").join(chunks) + "\n"


def test_help_matches_golden_file(capsys, monkeypatch):
    assert render_help(capsys, monkeypatch) == GOLDEN_HELP.read_text()


def test_golden_help_enumerates_every_command_and_flag():
    text = GOLDEN_HELP.read_text()
    for name, command in cli.commands.items():
        assert name in text
        for param in command.params:
            for opt in param.opts:
                if opt.startswith("--"):
                    assert opt in text, f"{name} flag {opt} missing from help"
    # the nested group's command and flags too
    synth = cli.commands["factory"].commands["synth"]
    for param in synth.params:
        for opt in param.opts:
            if opt.startswith("--"):
                assert opt in text


def test_unknown_command_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "frobnicate")
    assert code == EXIT_USAGE
    assert "No such command" in err


def test_missing_required_option_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "mediate")
    assert code == EXIT_USAGE
    assert "Usage: agentward mediate" in err
    assert "--graph" in err


def test_builtin_behavior_registry_is_complete():
    behaviors = builtin_behaviors()
    demo = json.loads(DEMO_GRAPH.read_text())
    assert {n["behavior"] for n in demo["nodes"]} <= set(behaviors)
