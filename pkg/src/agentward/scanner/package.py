"""Skill package model and directory loader."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..errors import UnreadablePackageError

_CODE_SUFFIXES = {".py", ".sh", ".bash", ".zsh", ".js", ".ts", ".rb", ".pl"}
_MANIFEST_NAMES = {"package.json", "pyproject.toml", "pipfile", "setup.py"}


def classify_file(name: str) -> str:
    """'code', 'manifest', or 'doc' from the file name alone."""
    lower = name.lower()
    base = lower.rsplit("/", 1)[-1]
    if base.startswith("requirements") and base.endswith(".txt"):
        return "manifest"
    if base in _MANIFEST_NAMES:
        return "manifest"
    if Path(base).suffix in _CODE_SUFFIXES:
        return "code"
    return "doc"


@dataclass(frozen=True)
class PackageFile:
    name: str
    content: str
    kind: str  # code | manifest | doc


@dataclass(frozen=True)
class SkillPackage:
    """A third-party skill: one instruction document plus auxiliary files."""

    name: str
    instruction_file: str
    instructions: str
    files: tuple[PackageFile, ...] = ()

    def __post_init__(self) -> None:
        if not self.instruction_file:
            raise UnreadablePackageError(f"package {self.name!r} has no instruction document")

    def code_files(self) -> tuple[PackageFile, ...]:
        return tuple(f for f in self.files if f.kind == "code")

    def manifest_files(self) -> tuple[PackageFile, ...]:
        return tuple(f for f in self.files if f.kind == "manifest")

    def doc_files(self) -> tuple[PackageFile, ...]:
        return tuple(f for f in self.files if f.kind == "doc")


def package_from_files(name: str, files: dict[str, str]) -> SkillPackage:
    """Build a package from in-memory {filename: content} (suite records)."""
    instruction_file = ""
    if "SKILL.md" in files:
        instruction_file = "SKILL.md"
    else:
        for fname in sorted(files):
            if fname.lower().endswith(".md"):
                instruction_file = fname
                break
    if not instruction_file:
        raise UnreadablePackageError(f"package {name!r} has no instruction document")
    aux = tuple(
        PackageFile(name=fname, content=content, kind=classify_file(fname))
        for fname, content in sorted(files.items())
        if fname != instruction_file
    )
    return SkillPackage(
        name=name,
        instruction_file=instruction_file,
        instructions=files[instruction_file],
        files=aux,
    )


def load_package(root: str | Path) -> SkillPackage:
    root = Path(root)
    if not root.is_dir():
        raise UnreadablePackageError(f"not a package directory: {root}")
    files: dict[str, str] = {}
    for path in sorted(root.rglob("*")):
        if not path.is_file() or path.name.startswith("."):
            continue
        try:
            content = path.read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            raise UnreadablePackageError(f"cannot read {path}: {exc}") from exc
        files[str(path.relative_to(root))] = content
    return package_from_files(root.name, files)
