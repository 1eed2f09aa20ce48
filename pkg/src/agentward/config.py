"""Engine configuration: defaults, key=value files, environment overrides.

Precedence: built-in defaults < config file < AGENTWARD_* environment
variables. Threshold relations are validated at load; a floor at or above
its ceiling is refused rather than silently reordered.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import InvalidConfigError

ENV_PREFIX = "AGENTWARD_"


@dataclass(frozen=True)
class Config:
    # bulk-send decision table
    review_floor: int = 20
    hard_ceiling: int = 200
    known_contact_floor: float = 0.5
    # judge routing
    judge_confidence: float = 0.7
    judge_cmd: str = ""
    judge_table: str = ""
    judge_timeout: float = 5.0
    # runner
    step_budget: int = 64
    # review tickets
    ticket_timeout: float = 600.0
    # operational rate/size limits
    rate_window: float = 60.0
    rate_max_calls: int = 30
    chunk_max_items: int = 50
    # stores and service
    audit_path: str = "audit.jsonl"
    registry_path: str = "registry.json"
    api_token: str = ""
    api_port: int = 8787
    # second-pass verb classifier toggle
    directionality: bool = True

    def validate(self) -> "Config":
        if self.review_floor < 0 or self.hard_ceiling < 0:
            raise InvalidConfigError("bulk-send thresholds must be non-negative")
        if self.review_floor >= self.hard_ceiling:
            raise InvalidConfigError(
                f"review_floor ({self.review_floor}) must stay below "
                f"hard_ceiling ({self.hard_ceiling})"
            )
        if not 0.0 <= self.judge_confidence <= 1.0:
            raise InvalidConfigError("judge_confidence must lie in [0, 1]")
        if not 0.0 <= self.known_contact_floor <= 1.0:
            raise InvalidConfigError("known_contact_floor must lie in [0, 1]")
        if self.step_budget < 0:
            raise InvalidConfigError("step_budget must be non-negative")
        if self.ticket_timeout <= 0 or self.judge_timeout <= 0:
            raise InvalidConfigError("timeouts must be positive")
        if self.rate_window <= 0 or self.rate_max_calls <= 0 or self.chunk_max_items <= 0:
            raise InvalidConfigError("rate/size limits must be positive")
        return self


def _coerce(name: str, raw: str, target_type: type):
    raw = raw.strip()
    if target_type is bool:
        lowered = raw.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise InvalidConfigError(f"{name}: {raw!r} is not a boolean")
    try:
        return target_type(raw)
    except ValueError as exc:
        raise InvalidConfigError(f"{name}: {raw!r} is not a {target_type.__name__}") from exc


def _field_types() -> dict[str, type]:
    return {f.name: f.type if isinstance(f.type, type) else type(f.default) for f in fields(Config)}


def parse_config_text(text: str, base: Config | None = None) -> Config:
    """Parse key=value lines; blank lines and #-comments are skipped."""
    types = _field_types()
    updates = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise InvalidConfigError(f"line {lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in types:
            raise InvalidConfigError(f"line {lineno}: unknown key {key!r}")
        updates[key] = _coerce(key, value, types[key])
    return replace(base or Config(), **updates)


def load_config(
    path: str | Path | None = None,
    *,
    env: dict[str, str] | None = None,
) -> Config:
    """Build the effective config: defaults, then file, then environment."""
    cfg = Config()
    if path is not None:
        p = Path(path)
        if p.exists():
            cfg = parse_config_text(p.read_text(encoding="utf-8"), cfg)
        else:
            raise InvalidConfigError(f"config file not found: {p}")
    env = os.environ if env is None else env
    types = _field_types()
    overrides = {}
    for name, target_type in types.items():
        env_key = ENV_PREFIX + name.upper()
        if env_key in env:
            overrides[name] = _coerce(name, env[env_key], target_type)
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg.validate()
