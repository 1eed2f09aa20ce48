"""Personal-data redaction with typed placeholders.

Pattern set v1 (extensible via extra_patterns): email addresses, 3-2-4
hyphenated national-id shapes, phone numbers, and street addresses. Matching
runs on the raw text so surrounding content survives verbatim; overlapping
candidates resolve by type priority (email, national_id, phone, address),
then left to right.

Phone grammar: "+" plus 7-15 contiguous digits, or [+country(1-3) sep]?
G1 sep G2 [sep G3 [sep G4]?]? with G1 of 2-3 digits (2-4 in parentheses,
separator optional after them), G2..G4 of 1-4 digits, single [-. ]
separators, and 7-15 digits overall. A bare 4-digit lead never starts a
phone, which keeps ISO dates unredacted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable

_EMAIL = re.compile(
    r"(?<![A-Za-z0-9._%+-])"
    r"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}"
    r"(?![A-Za-z0-9-])"
)

_NATIONAL_ID = re.compile(r"(?<!\d)\d{3}-\d{2}-\d{4}(?!-?\d)")

_PHONE = re.compile(
    r"(?<![\d+])"
    r"(?:"
    r"\+\d{7,15}(?!\d)"
    r"|"
    r"(?:\+\d{1,3}[-. ])?"
    r"(?:\(\d{2,4}\)[-. ]?|\d{2,3}[-. ])"
    r"\d{1,4}(?:[-. ]\d{1,4}){0,2}"
    r"(?!\d)"
    r")"
)

_ADDRESS = re.compile(
    r"(?<![A-Za-z0-9])"
    r"\d{1,5}(?: [A-Za-z]+){1,3}"
    r" (?:street|st|avenue|ave|road|rd|boulevard|blvd|lane|ln|drive|dr"
    r"|court|ct|way|place|pl)\.?"
    r"(?![A-Za-z])",
    re.IGNORECASE,
)


def _phone_digit_count_ok(match: re.Match) -> bool:
    return 7 <= sum(ch.isdigit() for ch in match.group(0)) <= 15


#: (kind, pattern, extra validator) in priority order.
PII_PATTERNS: tuple[tuple[str, re.Pattern, Callable[[re.Match], bool] | None], ...] = (
    ("email", _EMAIL, None),
    ("national_id", _NATIONAL_ID, None),
    ("phone", _PHONE, _phone_digit_count_ok),
    ("address", _ADDRESS, None),
)


@dataclass(frozen=True)
class PiiFinding:
    kind: str
    text: str
    span: tuple[int, int]


def find_pii(
    text: str,
    extra_patterns: Iterable[tuple[str, re.Pattern, Callable[[re.Match], bool] | None]] = (),
) -> list[PiiFinding]:
    """Locate PII spans without rewriting anything."""
    taken: list[tuple[int, int]] = []
    findings: list[PiiFinding] = []
    for kind, pattern, validator in tuple(PII_PATTERNS) + tuple(extra_patterns):
        for match in pattern.finditer(text):
            if validator is not None and not validator(match):
                continue
            span = match.span()
            if any(span[1] > s and span[0] < e for s, e in taken):
                continue
            taken.append(span)
            findings.append(PiiFinding(kind=kind, text=match.group(0), span=span))
    findings.sort(key=lambda f: f.span)
    return findings


def redact_pii(
    text: str,
    extra_patterns: Iterable[tuple[str, re.Pattern, Callable[[re.Match], bool] | None]] = (),
) -> tuple[str, list[PiiFinding]]:
    """Replace every finding with a typed placeholder.

    Placeholders contain no digits, so a second pass finds nothing new and
    the operation is idempotent.
    """
    findings = find_pii(text, extra_patterns)
    if not findings:
        return text, []
    out: list[str] = []
    cursor = 0
    for finding in findings:
        start, end = finding.span
        out.append(text[cursor:start])
        out.append(f"[REDACTED:{finding.kind}]")
        cursor = end
    out.append(text[cursor:])
    return "".join(out), findings
