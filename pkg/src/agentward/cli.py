"""Single command-line entry point wiring every module.

Exit codes mirror verdicts: 0 for a pass or plain success, 2 when a
review gated the outcome, 3 for a block, 1 for runtime errors, and 64
for usage mistakes.
"""

from __future__ import annotations

import json
import re
import textwrap
import threading
from pathlib import Path

import click

from .codeguard import gate_execution
from .config import Config, load_config
from .decision.judge import Judge, PipeJudge, ScriptedJudge
from .decision.rules import load_ruleset
from .errors import AgentwardError
from .factory import FactoryConfig, synthesize_safe_skill
from .graph.model import Graph
from .graph.runtime import ReviewRequest, Trajectory, run_workflow
from .harness import (
    DOMAINS,
    code_binding,
    emit_report,
    load_suite,
    run_suite,
    skills_binding,
    workspace_binding,
)
from .harness.reporting import render_table
from .interventions.audit import AuditLog
from .scanner import ScanReport, load_package, scan_package
from .service import ControlApiServer, Supervisor
from .skills import parse_skill_doc, serialize_skill_doc
from .verdicts import Decision, Severity, Verdict

EXIT_PASS = 0
EXIT_ERROR = 1
EXIT_REVIEW = 2
EXIT_BLOCK = 3
EXIT_USAGE = 64

VERDICT_EXIT = {
    Verdict.PASS: EXIT_PASS,
    Verdict.REVIEW: EXIT_REVIEW,
    Verdict.BLOCK: EXIT_BLOCK,
}

DEFAULT_RULESET = Path("rulesets/workspace.jsonl")
DEFAULT_UI_ROOT = Path("frontend/dist")

_CONTEXT = {"max_content_width": 78, "help_option_names": ["-h", "--help"]}

_EMAIL_RE = re.compile(r"[\w.+-]+@[\w-]+\.[\w.-]+")
_SSN_RE = re.compile(r"\b\d{3}-\d{2}-\d{4}\b")


# -- demo behaviors -----------------------------------------------------------


def builtin_behaviors() -> dict:
    """Behaviors available to graphs run straight from the command line."""

    def always_pass(value, state) -> Decision:
        return Decision(verdict=Verdict.PASS, rationale="no objection")

    def always_block(value, state) -> Decision:
        return Decision(
            verdict=Verdict.BLOCK, severity=Severity.HIGH, rationale="blocked by policy"
        )

    def user_confirm(value, state) -> Decision:
        return Decision(
            verdict=Verdict.REVIEW,
            severity=Severity.MEDIUM,
            rationale="operator confirmation required",
        )

    def pii_check(value, state) -> Decision:
        text = str(value)
        if _EMAIL_RE.search(text) or _SSN_RE.search(text):
            return Decision(
                verdict=Verdict.REVIEW,
                severity=Severity.MEDIUM,
                rationale="contact details in outbound content",
            )
        return Decision(verdict=Verdict.PASS, rationale="no contact details found")

    def code_guard(value, state) -> Decision:
        return gate_execution(str(value))

    def echo(value, state):
        return value

    def summarize(value, state):
        return f"summary({value})"

    def send(value, state):
        state.set("sent", value)
        return f"sent:{value}"

    return {
        "always_pass": always_pass,
        "always_block": always_block,
        "user_confirm": user_confirm,
        "pii_check": pii_check,
        "code_guard": code_guard,
        "echo": echo,
        "summarize": summarize,
        "send": send,
    }


# -- shared plumbing ----------------------------------------------------------


def _load_graph(path: Path) -> Graph:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"graph file is not valid JSON: {exc}") from None
    try:
        return Graph.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise click.ClickException(f"graph file is malformed: {exc!r}") from None


def _run_graph(config: Config, graph_path: Path, prompt: str, budget, resolver) -> Trajectory:
    graph = _load_graph(graph_path)
    behaviors = builtin_behaviors()
    missing = sorted({n.behavior for n in graph.nodes.values()} - set(behaviors))
    if missing:
        raise click.UsageError(
            f"graph names unknown behaviors: {', '.join(missing)} "
            f"(known: {', '.join(sorted(behaviors))})"
        )
    return run_workflow(
        graph,
        behaviors,
        prompt,
        budget=config.step_budget if budget is None else budget,
        resolver=resolver,
    )


def _print_trajectory(trajectory: Trajectory) -> None:
    for step in trajectory.steps:
        if step.decision is not None:
            suffix = f" [{step.resolution}]" if step.resolution else ""
            click.echo(
                f"  {step.node_id}: {step.decision.verdict.value}{suffix}"
                f" {step.decision.rationale}"
            )
        else:
            click.echo(f"  {step.node_id}: ran")
    click.echo(f"terminal: {trajectory.terminal}")
    if trajectory.blocked:
        click.echo(f"blocked: {', '.join(sorted(trajectory.blocked))}")
    final = trajectory.final_output()
    if final is not None:
        click.echo(f"output: {final}")


def _trajectory_exit(trajectory: Trajectory) -> int:
    """Worst enforcement outcome: block > unapproved review > pass."""
    code = EXIT_PASS
    for step in trajectory.steps:
        if step.decision is None:
            continue
        if step.decision.verdict is Verdict.BLOCK:
            return EXIT_BLOCK
        if step.decision.verdict is Verdict.REVIEW and step.resolution != "approved":
            code = EXIT_REVIEW
    return code


def _judge_from_config(config: Config) -> Judge | None:
    if config.judge_cmd:
        return PipeJudge(config.judge_cmd, timeout=config.judge_timeout)
    if config.judge_table:
        rows = json.loads(Path(config.judge_table).read_text(encoding="utf-8"))
        return ScriptedJudge(rows)
    return None


def _binding_for(domain: str, ruleset_path: Path | None, config: Config):
    if domain == "workspace":
        path = ruleset_path or DEFAULT_RULESET
        if not path.is_file():
            raise click.UsageError(
                "workspace evaluation needs --ruleset "
                f"(no {DEFAULT_RULESET} in the working directory)"
            )
        return workspace_binding(
            load_ruleset(path), judge=_judge_from_config(config), config=config
        )
    if domain == "skills":
        return skills_binding()
    return code_binding()


def _render_scan_report(report: ScanReport) -> str:
    lines = [
        f"package: {report.package}",
        f"verdict: {report.verdict.value} (severity {report.severity.value})",
    ]
    if report.findings:
        lines.append(f"findings ({len(report.findings)}):")
        for finding in report.findings:
            where = f"{finding.file}:{finding.line}" if finding.line else finding.file
            lines.append(f"  {finding.pattern.value:<28} {finding.severity.value:<8} {where}")
            lines.append(f"    {finding.evidence}")
    else:
        lines.append("findings: none")
    return "\n".join(lines)


# -- commands -----------------------------------------------------------------


@click.group(context_settings=_CONTEXT)
@click.option(
    "--config",
    "config_path",
    metavar="FILE",
    default=None,
    help="Key/value settings file; AGENTWARD_* variables override it.",
)
@click.pass_context
def cli(ctx: click.Context, config_path: str | None) -> None:
    """Mediated execution for agent workflows.

    Scan skill packages, gate scripts, run graphs where every functional
    step is checked first, score suites, and operate the review surface.
    """
    ctx.obj = load_config(config_path)


@cli.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False, path_type=Path))
def scan(directory: Path) -> int:
    """Scan a skill package directory for poisoning patterns."""
    report = scan_package(load_package(directory))
    click.echo(_render_scan_report(report))
    return VERDICT_EXIT[report.verdict]


@cli.command("guard-code")
@click.argument("script", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--context", default="", help="Declared purpose to judge the script against.")
def guard_code(script: Path, context: str) -> int:
    """Gate one script through data-flow analysis before it may run."""
    decision = gate_execution(script.read_text(encoding="utf-8"), context)
    click.echo(f"{decision.verdict.value} ({decision.severity.value}) {decision.rationale}")
    return VERDICT_EXIT[decision.verdict]


@cli.command()
@click.option(
    "--graph",
    "graph_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Workflow graph JSON file.",
)
@click.option("--prompt", default="", help="Input handed to the entry node.")
@click.option("--budget", type=int, default=None, help="Step budget override.")
@click.pass_obj
def mediate(config: Config, graph_path: Path, prompt: str, budget: int | None) -> int:
    """Run a graph end to end with every functional step mediated.

    No operator is attached, so review verdicts deny by default; use the
    review command for an interactive run.
    """
    trajectory = _run_graph(config, graph_path, prompt, budget, resolver=None)
    _print_trajectory(trajectory)
    return _trajectory_exit(trajectory)


@cli.command()
@click.option(
    "--graph",
    "graph_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Workflow graph JSON file.",
)
@click.option("--prompt", default="", help="Input handed to the entry node.")
@click.option("--budget", type=int, default=None, help="Step budget override.")
@click.option(
    "--assume",
    type=click.Choice(["ask", "approve", "deny"]),
    default="ask",
    show_default=True,
    help="Answer applied to review prompts; 'ask' prompts on this terminal.",
)
@click.pass_obj
def review(
    config: Config, graph_path: Path, prompt: str, budget: int | None, assume: str
) -> int:
    """Run a graph with review verdicts queued to this terminal.

    Each deferred step shows what is pending and why, then waits for an
    approve/deny answer. End of input counts as deny.
    """

    def resolver(request: ReviewRequest) -> bool:
        pending = textwrap.shorten(str(request.value), width=160, placeholder="...")
        if assume != "ask":
            approved = assume == "approve"
            click.echo(
                f"review {request.ticket_id} ({request.guard_id}):"
                f" auto-{'approve' if approved else 'deny'}"
            )
            return approved
        click.echo(f"review {request.ticket_id} from {request.guard_id}:")
        click.echo(f"  pending: {pending}")
        click.echo(f"  reason:  {request.decision.rationale}")
        try:
            return click.confirm("  approve this step?", default=False)
        except (click.Abort, EOFError):
            click.echo("no answer; denying")
            return False

    trajectory = _run_graph(config, graph_path, prompt, budget, resolver=resolver)
    _print_trajectory(trajectory)
    return _trajectory_exit(trajectory)


@cli.command("eval")
@click.option(
    "--suite",
    "suite_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Labeled JSONL suite file.",
)
@click.option("--domain", required=True, type=click.Choice(DOMAINS), help="Engine binding to score.")
@click.option(
    "--ruleset",
    "ruleset_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help=f"Workspace rule file (default: {DEFAULT_RULESET}).",
)
@click.option("--strict-fp", is_flag=True, help="Count only blocks as false positives on benign cases.")
@click.option("--workers", type=int, default=0, show_default=True, help="Thread count; 0 runs serially.")
@click.option(
    "--csv",
    "csv_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Also write the report to this CSV file.",
)
@click.pass_obj
def eval_cmd(
    config: Config,
    suite_path: Path,
    domain: str,
    ruleset_path: Path | None,
    strict_fp: bool,
    workers: int,
    csv_path: Path | None,
) -> int:
    """Score an engine binding against a labeled suite and print metrics."""
    suite = load_suite(suite_path)
    binding = _binding_for(domain, ruleset_path, config)
    report = run_suite(suite, binding, strict_fp=strict_fp, workers=workers)
    click.echo(render_table(report), nl=False)
    if csv_path is not None:
        emit_report(report, csv_path, fmt="csv")
        click.echo(f"csv written to {csv_path}")
    return EXIT_PASS


@cli.group()
def factory() -> None:
    """Counterpart synthesis for functional skills."""


@factory.command()
@click.argument("skill", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--seed", type=int, default=0, show_default=True, help="Generator seed.")
@click.option(
    "--max-iterations",
    type=int,
    default=10,
    show_default=True,
    help="Refinement rounds before giving up.",
)
def synth(skill: Path, seed: int, max_iterations: int) -> int:
    """Synthesize the enforcement counterpart for a skill document."""
    document = parse_skill_doc(skill.read_text(encoding="utf-8"))
    result = synthesize_safe_skill(
        document, FactoryConfig(seed=seed, max_iterations=max_iterations)
    )
    click.echo(serialize_skill_doc(result.counterpart))
    click.echo("")
    click.echo(
        f"iterations: {result.iterations}  tests: {len(result.tests)}"
        f"  overall: {result.report.overall:.3f}"
    )
    if result.converged:
        click.echo("converged: yes")
        return EXIT_PASS
    click.echo(f"converged: no ({result.warning or 'training plateaued'})")
    return EXIT_ERROR


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True, help="Interface to bind.")
@click.option("--port", type=int, default=None, help="Port to bind (default: configured api_port).")
@click.option(
    "--ui",
    "ui_root",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help=f"Built console assets to serve under /ui/ (default: {DEFAULT_UI_ROOT} when present).",
)
@click.option(
    "--audit-file",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Append audit events to this file (default: configured audit_path).",
)
@click.pass_obj
def serve(
    config: Config, host: str, port: int | None, ui_root: Path | None, audit_file: Path | None
) -> int:
    """Run the workflow supervisor and its control API in one process."""
    audit_path = audit_file
    if audit_path is None and config.audit_path:
        audit_path = Path(config.audit_path)
    if ui_root is None and DEFAULT_UI_ROOT.is_dir():
        ui_root = DEFAULT_UI_ROOT
    supervisor = Supervisor(config, audit=AuditLog(audit_path))
    server = ControlApiServer(supervisor, host=host, port=port, ui_root=ui_root)
    bound_host, bound_port = server.start()
    click.echo(
        f"control api v1 on http://{bound_host}:{bound_port}/"
        f" (token {'required' if server.token else 'not set'})"
    )
    if server.ui_root is not None:
        click.echo(f"console at http://{bound_host}:{bound_port}/ui/")
    click.echo("press Ctrl+C to stop")
    try:
        _wait_for_shutdown(server)
    except KeyboardInterrupt:
        click.echo("stopping")
    finally:
        server.stop()
    return EXIT_PASS


def _wait_for_shutdown(server: ControlApiServer) -> None:
    threading.Event().wait()


# -- entry points -------------------------------------------------------------


def dispatch(argv=None) -> int:
    """Run one command line; returns the process exit code."""
    try:
        result = cli.main(
            args=None if argv is None else list(argv),
            prog_name="agentward",
            standalone_mode=False,
        )
    except click.exceptions.UsageError as exc:
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
            click.echo(f"Try '{exc.ctx.command_path} --help' for help.", err=True)
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_ERROR
    except click.ClickException as exc:
        exc.show()
        return EXIT_ERROR
    except AgentwardError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_ERROR
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_ERROR
    return result if isinstance(result, int) else EXIT_PASS


def main() -> None:
    raise SystemExit(dispatch())


if __name__ == "__main__":
    main()
