"""Seed corpus loading: one directory per seed plus a label manifest."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import SuiteParseError


@dataclass(frozen=True)
class SeedCase:
    id: str
    cover: str
    threat: str
    label: str  # PASS or BLOCK
    source: str


def load_seed_corpus(root: str | Path) -> list[SeedCase]:
    root = Path(root)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise SuiteParseError(f"no manifest at {manifest_path}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    seeds = []
    for entry in manifest:
        for field in ("id", "cover", "threat", "label"):
            if field not in entry:
                raise SuiteParseError(f"manifest entry missing {field!r}: {entry}")
        if entry["label"] not in ("PASS", "BLOCK"):
            raise SuiteParseError(f"bad label for {entry['id']}: {entry['label']!r}")
        script = root / entry["id"] / "script.py"
        if not script.exists():
            raise SuiteParseError(f"missing script for seed {entry['id']}")
        seeds.append(
            SeedCase(
                id=entry["id"],
                cover=entry["cover"],
                threat=entry["threat"],
                label=entry["label"],
                source=script.read_text(encoding="utf-8"),
            )
        )
    return seeds
