"""Independent brute-force PII matcher used to check the shipped redactor.

This deliberately avoids regular expressions: every detector is a
position-by-position walk so the two implementations cannot share a bug.
The pattern-set contract (v1) both sides implement:

- email: local@domain.tld, local of [A-Za-z0-9._%+-], dotted domain labels,
  alphabetic TLD of length >= 2
- national_id: digit groups 3-2-4 joined by single hyphens
- phone: either "+" followed by 7-15 contiguous digits, or
  [+country(1-3 digits) sep]? G1 sep G2 [sep G3 [sep G4]?]? where G1 is 2-3
  digits or 2-4 digits in parentheses (separator optional after the parens),
  G2..G4 are 1-4 digits, sep is a single "-", "." or " ", and total digits
  land in [7, 15]; a bare 4-digit leading group never starts a phone, which
  keeps ISO dates out
- address: 1-5 digit house number, one to three alphabetic words, then a
  street-suffix word (St, Ave, Rd, ...), optional trailing period

Overlaps resolve by priority: email, national_id, phone, address; an earlier
type consumes its span.
"""

from __future__ import annotations

import random

LOCAL_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._%+-")
ALNUM_DASH = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-")
ALPHA = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
DIGITS = set("0123456789")
SEPARATORS = set("-. ")

STREET_SUFFIXES = {
    "st",
    "street",
    "ave",
    "avenue",
    "rd",
    "road",
    "blvd",
    "boulevard",
    "ln",
    "lane",
    "dr",
    "drive",
    "ct",
    "court",
    "way",
    "pl",
    "place",
}


def _find_emails(text: str) -> list[tuple[int, int]]:
    spans = []
    for at in range(len(text)):
        if text[at] != "@":
            continue
        start = at
        while start > 0 and text[start - 1] in LOCAL_CHARS:
            start -= 1
        if start == at:
            continue
        end = at + 1
        while end < len(text) and text[end] in ALNUM_DASH or (
            end < len(text) and text[end] == "." and end + 1 < len(text) and text[end + 1] in ALNUM_DASH
        ):
            end += 1
        domain = text[at + 1 : end]
        labels = domain.split(".")
        if len(labels) < 2 or any(not lbl for lbl in labels):
            continue
        tld = labels[-1]
        if len(tld) < 2 or any(ch not in ALPHA for ch in tld):
            # walk back: maybe the last label ended with junk; give up instead
            continue
        spans.append((start, end))
    return spans


def _find_national_ids(text: str) -> list[tuple[int, int]]:
    spans = []
    n = len(text)
    for i in range(n):
        # shape: ddd-dd-dddd with digit fences on both sides
        j = i
        if i > 0 and text[i - 1] in DIGITS:
            continue
        groups = []
        ok = True
        for size in (3, 2, 4):
            if j + size > n or any(text[k] not in DIGITS for k in range(j, j + size)):
                ok = False
                break
            groups.append(text[j : j + size])
            j += size
            if size != 4:
                if j >= n or text[j] != "-":
                    ok = False
                    break
                j += 1
        if not ok:
            continue
        if j < n and text[j] in DIGITS:
            continue
        if j < n and text[j] == "-" and j + 1 < n and text[j + 1] in DIGITS:
            continue  # part of a longer separated run, not the 3-2-4 shape
        spans.append((i, j))
    return spans


def _digit_run(text: str, j: int) -> int:
    n = len(text)
    k = j
    while k < n and text[k] in DIGITS:
        k += 1
    return k - j


def _parse_phone_at(text: str, i: int) -> int | None:
    """Return end index of a phone starting at i, or None. Greedy walk with
    no backtracking, step for step along the v1 grammar."""
    n = len(text)
    if i > 0 and (text[i - 1] in DIGITS or text[i - 1] == "+"):
        return None
    j = i
    digits = 0

    if j < n and text[j] == "+":
        j += 1
        run = _digit_run(text, j)
        # contiguous international form
        if 7 <= run <= 15:
            return j + run
        # country code: 1-3 digits then a single separator
        if not (1 <= run <= 3):
            return None
        j += run
        digits += run
        if j >= n or text[j] not in SEPARATORS:
            return None
        j += 1

    # G1: 2-3 digits + separator, or 2-4 digits in parens (separator optional)
    if j < n and text[j] == "(":
        run = _digit_run(text, j + 1)
        if not (2 <= run <= 4) or j + 1 + run >= n or text[j + 1 + run] != ")":
            return None
        digits += run
        j += run + 2
        if j < n and text[j] in SEPARATORS:
            j += 1
    else:
        run = _digit_run(text, j)
        if run not in (2, 3):
            return None
        digits += run
        j += run
        if j >= n or text[j] not in SEPARATORS:
            return None
        j += 1

    # G2 required, G3/G4 optional, 1-4 digits each, single separators
    run = _digit_run(text, j)
    if not (1 <= run <= 4):
        return None
    digits += run
    j += run
    for _ in range(2):
        if j < n and text[j] in SEPARATORS:
            run = _digit_run(text, j + 1)
            if 1 <= run <= 4:
                digits += run
                j += 1 + run
                continue
        break

    if not (7 <= digits <= 15):
        return None
    if j < n and text[j] in DIGITS:
        return None
    return j


def _find_phones(text: str) -> list[tuple[int, int]]:
    spans = []
    i = 0
    while i < len(text):
        end = _parse_phone_at(text, i)
        if end is not None:
            spans.append((i, end))
            i = end
        else:
            i += 1
    return spans


def _find_addresses(text: str) -> list[tuple[int, int]]:
    spans = []
    n = len(text)
    i = 0
    while i < n:
        if text[i] not in DIGITS or (i > 0 and (text[i - 1] in DIGITS or text[i - 1] in ALPHA)):
            i += 1
            continue
        j = i
        while j < n and text[j] in DIGITS:
            j += 1
        if j - i > 5 or j >= n or text[j] != " ":
            i += 1
            continue
        # up to three alphabetic words, the last matching a street suffix
        k = j
        words = 0
        end_of_match = None
        while words < 4:
            if k >= n or text[k] != " ":
                break
            w = k + 1
            while w < n and text[w] in ALPHA:
                w += 1
            if w == k + 1:
                break
            word = text[k + 1 : w]
            words += 1
            trail = w
            if trail < n and text[trail] == "." and word.lower() in STREET_SUFFIXES:
                trail += 1
            if word.lower() in STREET_SUFFIXES and words >= 2:
                end_of_match = trail
                break
            k = w
        if end_of_match is not None:
            spans.append((i, end_of_match))
            i = end_of_match
        else:
            i += 1
    return spans


def oracle_findings(text: str) -> list[tuple[str, int, int]]:
    """All PII spans as (type, start, end), priority-consumed, sorted."""
    taken: list[tuple[int, int]] = []
    out: list[tuple[str, int, int]] = []

    def free(span: tuple[int, int]) -> bool:
        return all(span[1] <= s or span[0] >= e for s, e in taken)

    for kind, finder in (
        ("email", _find_emails),
        ("national_id", _find_national_ids),
        ("phone", _find_phones),
        ("address", _find_addresses),
    ):
        for span in finder(text):
            if free(span):
                taken.append(span)
                out.append((kind, span[0], span[1]))
    return sorted(out, key=lambda f: f[1])


# -- seeded corpus --------------------------------------------------------------

_CLEAN_TEMPLATES = [
    "the deploy finished at 12:30 with 0 errors",
    "version 1.2.3.4 shipped on 2026-08-21",
    "order 12345678901 total $12.99 plus 8.5% tax",
    "meeting moved to room 204 at 9am",
    "the quarterly report covers 2025-10-01 through 2025-12-31",
    "cpu usage hit 93.7 percent for 45 seconds",
    "ticket 4821 closed after 3 days",
    "build 20260821 passed 412 of 412 checks",
    "the recipe needs 2 cups flour and 350 degrees",
    "pi is 3.14159 and e is 2.71828",
    "she moved the meeting to thursday afternoon",
    "the train departs from platform 9",
    "backup completed in 74 minutes across 12 volumes",
    "invoice total came to 1499.00 before discount",
    "page 47 of the manual covers error 500",
]

_PHONE_FORMATS = [
    lambda r: f"{r.randint(200, 999)}-{r.randint(1000, 9999)}",
    lambda r: f"{r.randint(200, 999)}-{r.randint(200, 999)}-{r.randint(1000, 9999)}",
    lambda r: f"({r.randint(200, 999)}) {r.randint(200, 999)}-{r.randint(1000, 9999)}",
    lambda r: f"+{r.randint(1, 9)} {r.randint(200, 999)} {r.randint(200, 999)} {r.randint(1000, 9999)}",
    lambda r: f"+{r.randint(10000000000, 99999999999)}",
    lambda r: f"{r.randint(200, 999)}.{r.randint(200, 999)}.{r.randint(1000, 9999)}",
]

_EMAIL_NAMES = ["ana", "bo.liu", "c_ramos", "dee+alerts", "eve99", "frank.s"]
_EMAIL_HOSTS = ["example.com", "mail.example.org", "corp.internal.net", "uni.edu"]

_STREET_NAMES = ["Oak", "Maple", "Cedar Hill", "Birch", "Willow Creek", "Elm"]
_STREET_SUFFIX_FORMS = ["St", "Street", "Ave", "Avenue", "Rd", "Road", "Blvd", "Lane", "Dr", "Court"]

_WRAPPERS = [
    "call me at {} before noon",
    "reach the on-call via {} after hours",
    "her contact is {} according to the sheet",
    "forward everything to {} by friday",
    "the form lists {} under emergency info",
    "note {} in the customer record",
    "they said {} twice during intake",
]


def _make_phone(r: random.Random) -> str:
    return r.choice(_PHONE_FORMATS)(r)


def _make_email(r: random.Random) -> str:
    return f"{r.choice(_EMAIL_NAMES)}@{r.choice(_EMAIL_HOSTS)}"


def _make_address(r: random.Random) -> str:
    return f"{r.randint(1, 9999)} {r.choice(_STREET_NAMES)} {r.choice(_STREET_SUFFIX_FORMS)}"


def _make_national_id(r: random.Random) -> str:
    return f"{r.randint(100, 999)}-{r.randint(10, 99)}-{r.randint(1000, 9999)}"


_MAKERS = {
    "phone": _make_phone,
    "email": _make_email,
    "address": _make_address,
    "national_id": _make_national_id,
}


def build_corpus(seed: int = 20260821, size: int = 500) -> list[tuple[str, list[str]]]:
    """Deterministic mix of clean and PII-bearing strings.

    Returns (text, expected-kinds) pairs; expected-kinds lists what was
    embedded, in order of appearance. Roughly 30% of entries are clean.
    """
    r = random.Random(seed)
    corpus: list[tuple[str, list[str]]] = []
    kinds = list(_MAKERS)
    for i in range(size):
        if i % 10 < 3:
            corpus.append((r.choice(_CLEAN_TEMPLATES), []))
            continue
        count = r.randint(1, 3)
        parts, embedded = [], []
        for _ in range(count):
            kind = r.choice(kinds)
            embedded.append(kind)
            parts.append(r.choice(_WRAPPERS).format(_MAKERS[kind](r)))
        corpus.append(("; ".join(parts), embedded))
    return corpus


if __name__ == "__main__":
    from collections import Counter

    corpus = build_corpus()
    total = Counter()
    mismatches = 0
    for text, expected in corpus:
        found = [k for k, _, _ in oracle_findings(text)]
        total.update(found)
        if found != expected:
            mismatches += 1
            if mismatches <= 10:
                print("MISMATCH:", repr(text))
                print("  expected:", expected)
                print("  oracle:  ", found)
    print("entries:", len(corpus))
    print("totals:", dict(sorted(total.items())))
    print("mismatches vs embedded:", mismatches)
