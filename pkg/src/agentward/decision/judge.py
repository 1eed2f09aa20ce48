"""Pluggable semantic judge: protocol, scripted mock, and subprocess bridge.

A judge answers one question — how should this action be treated — with a
verdict, a rationale, and a confidence in [0, 1]. The engine consults it only
for actions the rule layer declined to decide, and treats any malfunction
(timeout, bad output, out-of-range confidence) as the judge being unavailable.
"""

from __future__ import annotations

import json
import re
import shlex
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from ..errors import JudgeUnavailableError
from ..verdicts import Verdict


@dataclass(frozen=True)
class JudgeRequest:
    action: str
    context_excerpt: str = ""
    policy_excerpt: str = ""

    def to_dict(self) -> dict:
        return {
            "action": self.action,
            "context_excerpt": self.context_excerpt,
            "policy_excerpt": self.policy_excerpt,
        }


@dataclass(frozen=True)
class JudgeResponse:
    verdict: Verdict
    rationale: str = ""
    confidence: float = 0.0

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "rationale": self.rationale,
            "confidence": self.confidence,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "JudgeResponse":
        verdict = Verdict(d["verdict"])
        confidence = float(d.get("confidence", 0.0))
        if not 0.0 <= confidence <= 1.0:
            raise ValueError(f"confidence {confidence} outside [0, 1]")
        return cls(verdict=verdict, rationale=d.get("rationale", ""), confidence=confidence)


class Judge(Protocol):
    name: str

    def assess(self, request: JudgeRequest) -> JudgeResponse: ...


class ScriptedJudge:
    """Deterministic judge driven by a response table.

    The table is JSONL: {"match": <substring or regex>, "verdict": ...,
    "confidence": ..., "rationale": ...}. First matching row wins; a row with
    match "*" is the catch-all. No row matching means unavailable.
    """

    def __init__(self, rows: list[dict], name: str = "scripted") -> None:
        self.name = name
        self._rows = []
        for row in rows:
            matcher = row.get("match", "*")
            if matcher != "*":
                try:
                    compiled = re.compile(matcher, re.IGNORECASE)
                except re.error:
                    compiled = None
            else:
                compiled = None
            self._rows.append((matcher, compiled, row))

    @classmethod
    def from_table(cls, path: str | Path, name: str = "scripted") -> "ScriptedJudge":
        rows = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line.strip() and not line.lstrip().startswith("#"):
                rows.append(json.loads(line))
        return cls(rows, name=name)

    def assess(self, request: JudgeRequest) -> JudgeResponse:
        for matcher, compiled, row in self._rows:
            if matcher == "*":
                hit = True
            elif compiled is not None:
                hit = compiled.search(request.action) is not None
            else:
                hit = matcher.lower() in request.action.lower()
            if hit:
                return JudgeResponse.from_dict(row)
        raise JudgeUnavailableError(f"no table row matches {request.action!r}")


class ConstantJudge:
    """Always answers the same way; handy for adversarial probes."""

    def __init__(
        self, verdict: Verdict, confidence: float = 1.0, name: str = "constant"
    ) -> None:
        self.name = name
        self._response = JudgeResponse(
            verdict=verdict, rationale=f"always {verdict.value}", confidence=confidence
        )

    def assess(self, request: JudgeRequest) -> JudgeResponse:
        return self._response


class PipeJudge:
    """Judge reached over a subprocess pipe.

    Each assessment spawns the command, writes one JSON request line to its
    stdin, and reads one JSON response line from stdout. Slow but hermetic;
    the timeout converts hangs into unavailability.
    """

    def __init__(self, cmd: str | list[str], timeout: float = 5.0, name: str = "pipe") -> None:
        self.name = name
        self._argv = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
        self._timeout = timeout

    def assess(self, request: JudgeRequest) -> JudgeResponse:
        payload = json.dumps(request.to_dict()) + "\n"
        try:
            proc = subprocess.run(
                self._argv,
                input=payload,
                capture_output=True,
                text=True,
                timeout=self._timeout,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise JudgeUnavailableError(f"judge process failed: {exc}") from exc
        if proc.returncode != 0:
            raise JudgeUnavailableError(
                f"judge exited {proc.returncode}: {proc.stderr.strip()[:200]}"
            )
        line = proc.stdout.strip().splitlines()
        if not line:
            raise JudgeUnavailableError("judge produced no output")
        try:
            return JudgeResponse.from_dict(json.loads(line[-1]))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise JudgeUnavailableError(f"judge response malformed: {exc}") from exc


def serve_table(table_path: str, stdin=None, stdout=None) -> int:
    """Answer JSON request lines from a scripted table; the pipe-side server.

    Reads requests from stdin until EOF, one response line each. Unmatched
    requests answer with an error record and a nonzero final exit.
    """
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    judge = ScriptedJudge.from_table(table_path)
    failures = 0
    for line in stdin:
        if not line.strip():
            continue
        try:
            request = JudgeRequest(**json.loads(line))
            response = judge.assess(request)
            stdout.write(json.dumps(response.to_dict()) + "\n")
        except Exception as exc:
            failures += 1
            stdout.write(json.dumps({"error": str(exc)}) + "\n")
        stdout.flush()
    return 1 if failures else 0


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print("usage: python -m agentward.decision.judge <table.jsonl>", file=sys.stderr)
        return 64
    return serve_table(args[0])


if __name__ == "__main__":
    raise SystemExit(main())
