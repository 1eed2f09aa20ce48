"""Semantic-preserving mutation operators for gate robustness testing.

Each operator rewrites a script cosmetically: control flow, data flow, and
every payload token stay intact. An operator that cannot apply safely returns
the source unchanged, so campaigns never manufacture accidental semantics.
"""

from __future__ import annotations

import ast
import builtins
import io
import keyword
import random
import re
import tokenize
from dataclasses import dataclass

_DEAD_IMPORTS = (
    "bisect",
    "decimal",
    "fractions",
    "functools",
    "heapq",
    "itertools",
    "statistics",
    "string",
    "textwrap",
    "uuid",
)

_COMMENTS = (
    "# reviewed during the quarterly cleanup",
    "# keep in sync with the ops runbook",
    "# timing measured on the staging box",
    "# intentionally simple, see team notes",
    "# retained for the next migration pass",
)


@dataclass(frozen=True)
class MutationOperator:
    id: str
    description: str


def _top_level_gaps(source: str) -> list[int]:
    """Line numbers (1-based) between adjacent top-level statements."""
    try:
        tree = ast.parse(source)
    except SyntaxError:
        return []
    gaps = []
    body = tree.body
    for i in range(len(body) - 1):
        end = getattr(body[i], "end_lineno", None)
        start = body[i + 1].lineno
        if end is not None and start > end:
            gaps.append(end)
        elif end is not None:
            gaps.append(end)
    return gaps


def _insert_line(source: str, lineno: int, text: str) -> str:
    lines = source.splitlines(keepends=True)
    if not lines:
        return text + "\n"
    lineno = max(0, min(lineno, len(lines)))
    lines.insert(lineno, text + "\n")
    return "".join(lines)


def _string_values(source: str) -> set[str]:
    try:
        tree = ast.parse(source)
    except SyntaxError:
        return set()
    return {
        n.value
        for n in ast.walk(tree)
        if isinstance(n, ast.Constant) and isinstance(n.value, str)
    }


def _dead_imports(source: str, rng: random.Random) -> str:
    unused = [m for m in _DEAD_IMPORTS if m not in source]
    if not unused:
        return source
    module = rng.choice(unused)
    gaps = _top_level_gaps(source)
    at = rng.choice(gaps) if gaps else 0
    return _insert_line(source, at, f"import {module}")


def _unreachable_function(source: str, rng: random.Random) -> str:
    name = f"_probe_{rng.randrange(10**6)}"
    body = f"\n\ndef {name}():\n    return {rng.randrange(100)}\n"
    return source.rstrip("\n") + body


def _unused_variable(source: str, rng: random.Random) -> str:
    name = f"_pad_{rng.randrange(10**6)}"
    gaps = _top_level_gaps(source)
    at = rng.choice(gaps) if gaps else 0
    return _insert_line(source, at, f"{name} = {rng.randrange(1000)}")


def _type_hint(source: str, rng: random.Random) -> str:
    name = f"_hinted_{rng.randrange(10**6)}"
    gaps = _top_level_gaps(source)
    at = rng.choice(gaps) if gaps else 0
    return _insert_line(source, at, f"{name}: int = {rng.randrange(1000)}")


def _reformat(source: str, rng: random.Random) -> str:
    gaps = _top_level_gaps(source)
    if not gaps:
        return source + "\n"
    at = rng.choice(gaps)
    return _insert_line(source, at, "")


def _rename_identifier(source: str, rng: random.Random) -> str:
    try:
        tree = ast.parse(source)
    except SyntaxError:
        return source
    strings = _string_values(source)
    assigned = set()
    imported = set()
    attr_or_kw = set()
    for node in ast.walk(tree):
        if isinstance(node, (ast.Import, ast.ImportFrom)):
            for alias in node.names:
                imported.add((alias.asname or alias.name).split(".")[0])
        elif isinstance(node, ast.Name) and isinstance(node.ctx, ast.Store):
            assigned.add(node.id)
        elif isinstance(node, ast.arg):
            assigned.add(node.arg)
        if isinstance(node, ast.Attribute):
            attr_or_kw.add(node.attr)
        elif isinstance(node, ast.keyword) and node.arg:
            attr_or_kw.add(node.arg)
        elif isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            attr_or_kw.add(node.name)
    reserved = set(dir(builtins)) | set(keyword.kwlist) | imported | attr_or_kw
    candidates = sorted(
        n
        for n in assigned
        if len(n) >= 2
        and not n.startswith("__")
        and n not in reserved
        and not any(n in s for s in strings)
    )
    if not candidates:
        return source
    old = rng.choice(candidates)
    new = f"{old}_v{rng.randrange(100)}"
    return re.sub(rf"\b{re.escape(old)}\b", new, source)


def _comment_mutation(source: str, rng: random.Random) -> str:
    gaps = _top_level_gaps(source)
    at = rng.choice(gaps) if gaps else 0
    return _insert_line(source, at, rng.choice(_COMMENTS))


def _quote_style(source: str, rng: random.Random) -> str:
    try:
        tokens = list(tokenize.generate_tokens(io.StringIO(source).readline))
    except (tokenize.TokenError, IndentationError, SyntaxError):
        return source
    simple = []
    for tok in tokens:
        if tok.type != tokenize.STRING:
            continue
        text = tok.string
        if text.startswith(("'", '"')) and len(text) >= 2 and text[0] == text[-1]:
            quote = text[0]
            other = '"' if quote == "'" else "'"
            inner = text[1:-1]
            if (
                not text.startswith(("'''", '"""'))
                and "\\" not in inner
                and quote not in inner
                and other not in inner
            ):
                simple.append((tok, other))
    if not simple:
        return source
    tok, other = rng.choice(simple)
    lines = source.splitlines(keepends=True)
    row = tok.start[0] - 1
    line = lines[row]
    start, end = tok.start[1], tok.end[1]
    lines[row] = line[:start] + other + tok.string[1:-1] + other + line[end:]
    return "".join(lines)


def _reorder_imports(source: str, rng: random.Random) -> str:
    try:
        tree = ast.parse(source)
    except SyntaxError:
        return source
    body = tree.body
    swappable = []
    for i in range(len(body) - 1):
        a, b = body[i], body[i + 1]
        if (
            isinstance(a, ast.Import)
            and isinstance(b, ast.Import)
            and a.end_lineno == a.lineno
            and b.end_lineno == b.lineno
            and b.lineno == a.lineno + 1
        ):
            swappable.append((a.lineno, b.lineno))
    if not swappable:
        return source
    la, lb = rng.choice(swappable)
    lines = source.splitlines(keepends=True)
    lines[la - 1], lines[lb - 1] = lines[lb - 1], lines[la - 1]
    return "".join(lines)


_IMPLS = {
    "dead-imports": _dead_imports,
    "unreachable-function": _unreachable_function,
    "unused-variable": _unused_variable,
    "type-hint": _type_hint,
    "reformat": _reformat,
    "rename-identifier": _rename_identifier,
    "comment": _comment_mutation,
    "quote-style": _quote_style,
    "reorder-imports": _reorder_imports,
}

OPERATORS: tuple[MutationOperator, ...] = (
    MutationOperator("dead-imports", "insert an import that nothing uses"),
    MutationOperator("unreachable-function", "append a function nothing calls"),
    MutationOperator("unused-variable", "insert a top-level variable nothing reads"),
    MutationOperator("type-hint", "insert an annotated constant"),
    MutationOperator("reformat", "insert blank lines between top-level statements"),
    MutationOperator("rename-identifier", "rename one non-critical local identifier"),
    MutationOperator("comment", "insert a standalone comment line"),
    MutationOperator("quote-style", "swap quote characters on one simple string"),
    MutationOperator("reorder-imports", "swap two adjacent single-line imports"),
)

OPERATOR_IDS = tuple(op.id for op in OPERATORS)


def mutate(source: str, operator: str | MutationOperator, seed: int) -> str:
    """Apply one operator deterministically; inapplicable operators are identity."""
    op_id = operator.id if isinstance(operator, MutationOperator) else operator
    impl = _IMPLS.get(op_id)
    if impl is None:
        raise KeyError(f"unknown mutation operator: {op_id!r}")
    out = impl(source, random.Random(seed))
    try:
        ast.parse(out)
    except SyntaxError:
        return source
    return out
