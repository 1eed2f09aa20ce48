"""End-to-end counterpart synthesis: model, write, test, diagnose, refine.

The loop evaluates on a training suite and refines against its failures; a
second suite generated from a different seed stays held out, and a refinement
that lowers held-out accuracy is reverted. That makes held-out accuracy
non-decreasing across accepted iterations by construction.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..skills import SafePairRegistry, SkillDocument, serialize_skill_doc
from .generate import DeterministicGenerator, phase3_generate_tests
from .model import EvalReport, FactoryConfig, SynthesisResult, TestCase
from .phases import (
    phase1_threat_model,
    phase2_write_spec,
    phase4_evaluate,
    phase5_root_cause,
    phase6_refine,
)

_HOLDOUT_SEED_OFFSET = 1000


def _write_artifacts(root: Path, result: SynthesisResult) -> None:
    root.mkdir(parents=True, exist_ok=True)
    (root / "counterpart.md").write_text(
        serialize_skill_doc(result.counterpart), encoding="utf-8"
    )
    (root / "threat_model.json").write_text(
        json.dumps(result.model.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    suite_lines = [json.dumps(case.to_dict(), sort_keys=True) for case in result.tests]
    (root / "suite.jsonl").write_text("\n".join(suite_lines) + "\n", encoding="utf-8")
    (root / "report.json").write_text(
        json.dumps(result.report.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    log_lines = [json.dumps(entry, sort_keys=True) for entry in result.log]
    (root / "iterations.jsonl").write_text(
        ("\n".join(log_lines) + "\n") if log_lines else "", encoding="utf-8"
    )


def synthesize_safe_skill(
    skill: SkillDocument, config: FactoryConfig | None = None
) -> SynthesisResult:
    """Synthesize, evaluate, and refine an enforcement counterpart.

    Returns a result that unpacks as (counterpart, tests, report). The pair is
    registered unless a configured checkpoint callable rejects it.
    """
    cfg = config or FactoryConfig()
    registry = cfg.registry if cfg.registry is not None else SafePairRegistry()

    model = phase1_threat_model(skill, cfg.judge)
    spec = phase2_write_spec(model)

    if not model.operations:
        report = phase4_evaluate(spec, [])
        registered = _maybe_register(registry, cfg, skill.name, spec, report)
        result = SynthesisResult(
            counterpart=spec,
            tests=(),
            report=report,
            model=model,
            iterations=0,
            converged=True,
            registered=registered,
            registry=registry,
        )
        if cfg.artifact_dir is not None:
            _write_artifacts(Path(cfg.artifact_dir) / skill.name, result)
        return result

    if cfg.generator is not None:
        train_gen = holdout_gen = cfg.generator
    else:
        train_gen = DeterministicGenerator(model, seed=cfg.seed)
        holdout_gen = DeterministicGenerator(
            model, seed=cfg.seed + _HOLDOUT_SEED_OFFSET, id_prefix="h"
        )
    train = phase3_generate_tests(spec, train_gen, cfg.counts)
    holdout = phase3_generate_tests(spec, holdout_gen, cfg.counts)

    history: list[float] = []
    holdout_history: list[float] = []
    log: list[dict] = []
    converged = False
    warning: str | None = None

    for iteration in range(cfg.max_iterations):
        report = phase4_evaluate(spec, train)
        held = phase4_evaluate(spec, holdout)
        history.append(report.overall)
        holdout_history.append(held.overall)
        causes = phase5_root_cause(report, cfg.judge)
        entry = {
            "iteration": iteration,
            "train_accuracy": report.overall,
            "holdout_accuracy": held.overall,
            "causes": [c.to_dict() for c in causes],
        }

        candidate, converged = phase6_refine(spec, causes, history, config=cfg)
        if not causes:
            entry["outcome"] = "converged"
            log.append(entry)
            break
        if candidate is not spec:
            held_after = phase4_evaluate(candidate, holdout)
            if held_after.overall < held.overall:
                entry["outcome"] = "reverted"
            else:
                spec = candidate
                entry["outcome"] = "accepted"
        else:
            entry["outcome"] = "no_change"
        log.append(entry)
        if converged:
            warning = "stopped with unresolved causes; refinement exhausted its budget"
            break
    else:
        converged = True
        warning = "iteration cap reached before the suite came clean"

    tests: tuple[TestCase, ...] = tuple(train) + tuple(holdout)
    final_report: EvalReport = phase4_evaluate(spec, list(tests))
    registered = _maybe_register(registry, cfg, skill.name, spec, final_report)

    result = SynthesisResult(
        counterpart=spec,
        tests=tests,
        report=final_report,
        model=model,
        iterations=len(history),
        converged=converged,
        registered=registered,
        registry=registry,
        warning=warning,
        train_history=tuple(history),
        holdout_history=tuple(holdout_history),
        log=tuple(log),
    )
    if cfg.artifact_dir is not None:
        _write_artifacts(Path(cfg.artifact_dir) / skill.name, result)
    return result


def _maybe_register(
    registry, cfg: FactoryConfig, functional: str, spec: SkillDocument, report: EvalReport
) -> bool:
    """Register the pair unless the optional human checkpoint rejects it."""
    if cfg.checkpoint is not None and not cfg.checkpoint(spec, report):
        return False
    registry.register_pair(functional, spec, overwrite=True)
    return True
