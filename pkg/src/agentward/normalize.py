"""Obfuscation normalization applied before any pattern matching.

The same pipeline backs rule evaluation and failure-memory signatures, so a
past incident recorded in plain text still matches a base64 or zero-width
recurrence of itself.

Steps, in order: strip zero-width codepoints, decode base64-looking tokens
whose decoded form is printable text, casefold, collapse whitespace.
"""

from __future__ import annotations

import base64
import binascii
import re

#: Zero-width and invisible formatting codepoints used to split keywords.
ZERO_WIDTH = (
    "​",  # zero width space
    "‌",  # zero width non-joiner
    "‍",  # zero width joiner
    "⁠",  # word joiner
    "﻿",  # BOM / zero width no-break space
    "­",  # soft hyphen
)

_ZW_RE = re.compile("|".join(ZERO_WIDTH))
_WS_RE = re.compile(r"\s+")

# Candidate tokens: long enough to be a deliberate encoding, valid alphabet.
# \b cannot close the match because "=" padding is not a word character.
_B64_TOKEN_RE = re.compile(r"(?<![A-Za-z0-9+/=])[A-Za-z0-9+/]{16,}={0,2}(?![A-Za-z0-9+/=])")


def strip_zero_width(text: str) -> str:
    return _ZW_RE.sub("", text)


def _decode_candidate(token: str) -> str | None:
    # tolerate stripped padding; anything else off-size is not base64
    remainder = len(token) % 4
    if remainder == 1:
        return None
    if remainder:
        token += "=" * (4 - remainder)
    try:
        raw = base64.b64decode(token, validate=True)
        decoded = raw.decode("utf-8")
    except (binascii.Error, UnicodeDecodeError, ValueError):
        return None
    # Only accept decodings that look like text, not binary noise.
    if not decoded:
        return None
    printable = sum(1 for ch in decoded if ch.isprintable() or ch in "\n\t ")
    if printable / len(decoded) < 0.95:
        return None
    return decoded


def decode_base64_candidates(text: str) -> str:
    """Append the decoded text after each base64-looking token.

    The original token is kept (patterns over either form still match) and
    the append is skipped when the decoding already follows the token, which
    keeps the transformation idempotent.
    """

    def _sub(m: re.Match[str]) -> str:
        decoded = _decode_candidate(m.group(0))
        if decoded is None:
            return m.group(0)
        tail = text[m.end() : m.end() + len(decoded) + 1]
        if tail.strip().startswith(decoded.strip()[:20]) and decoded.strip():
            return m.group(0)
        return f"{m.group(0)} {decoded}"

    return _B64_TOKEN_RE.sub(_sub, text)


def normalize(text: str) -> str:
    """Full normalization pipeline."""
    text = strip_zero_width(text)
    text = decode_base64_candidates(text)
    text = text.casefold()
    text = _WS_RE.sub(" ", text).strip()
    return text


def signature(text: str) -> str:
    """Stable matching signature for failure-memory records."""
    return normalize(text)
