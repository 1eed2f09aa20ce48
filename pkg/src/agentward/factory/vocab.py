"""Shared vocabulary for counterpart synthesis.

The test generator and the root-cause analyzer consult the same tables, so a
paraphrase the generator produced by synonym swap is recoverable later by
reverse lookup. Keeping both sides on one vocabulary is what makes the
refinement loop deterministic.
"""

from __future__ import annotations

R1 = "R1"
R2 = "R2"
R3 = "R3"

RISK_CATEGORIES = frozenset({R1, R2, R3})

# Capability words that imply a gated operation. Order matters: ops are
# enumerated in table order, which fixes directive numbering downstream.
RISK_TAGS: tuple[dict, ...] = (
    {
        "words": frozenset(
            {"send", "mail", "email", "share", "post", "publish", "dispatch", "message"}
        ),
        "action": "send content to an external recipient",
        "category": R3,
        "dimensions": {
            "reversibility": "short_recovery",
            "blast_radius": "single_user",
            "externality": "external_system",
            "sensitivity": "private_data",
        },
        "keywords": ("send", "external"),
        "sensitive_terms": ("ssn", "social security", "credit card", "passport"),
    },
    {
        "words": frozenset({"pay", "payment", "transfer", "wire", "purchase", "buy", "order"}),
        "action": "move money out of an account",
        "category": R3,
        "dimensions": {
            "reversibility": "hard_to_reverse",
            "blast_radius": "single_user",
            "externality": "real_world",
            "sensitivity": "credentials_money",
        },
        "keywords": ("transfer", "payment"),
        "sensitive_terms": ("account number", "routing number", "card number"),
    },
    {
        "words": frozenset({"delete", "remove", "purge", "erase", "wipe", "trash", "clean", "cleanup"}),
        "action": "destroy stored records",
        "category": R1,
        "dimensions": {
            "reversibility": "irreversible",
            "blast_radius": "single_user",
            "externality": "fully_local",
            "sensitivity": "non_sensitive",
        },
        "keywords": ("delete", None),  # noun resolved from the skill's own vocabulary
        "sensitive_terms": (),
    },
    {
        "words": frozenset({"broadcast", "bulk", "announce", "everyone", "migrate", "batch"}),
        "action": "apply one operation across many accounts at once",
        "category": R2,
        "dimensions": {
            "reversibility": "hard_to_reverse",
            "blast_radius": "many_affected",
            "externality": "cloud_api",
            "sensitivity": "non_sensitive",
        },
        "keywords": ("broadcast", "bulk"),
        "sensitive_terms": (),
    },
)

# Words that mark a skill as read-only or otherwise self-evidently unrisky.
# Matching one of these counts as tag coverage even when no op is emitted.
BENIGN_TAGS = frozenset(
    {
        "read",
        "view",
        "list",
        "show",
        "display",
        "report",
        "summarize",
        "search",
        "lookup",
        "fetch",
        "weather",
        "forecast",
        "audit",
        "count",
        "local",
        "status",
    }
)

# Synonyms the generator may substitute and the analyzer can map back.
SYNONYMS: dict[str, tuple[str, ...]] = {
    "send": ("forward", "relay"),
    "external": ("outside",),
    "delete": ("purge", "discard"),
    "transfer": ("route", "move"),
    "payment": ("payout",),
    "broadcast": ("blast",),
    "bulk": ("mass",),
}

SYNONYM_TO_CANONICAL: dict[str, str] = {
    syn: canon for canon, syns in SYNONYMS.items() for syn in syns
}

# Vague sensitivity references that justify a REVIEW but never prove a BLOCK.
AMBIGUITY_MARKERS = ("sensitive", "confidential", "personal")

# Destination words that mark an operation as staying on the local machine.
LOCAL_MARKERS = ("local", "locally", "csv", "disk", "offline")

# Words skipped when recovering the operative verb from a generated case.
STOPWORDS = frozenset(
    {
        "a", "an", "and", "any", "at", "away", "before", "by", "can", "chance",
        "cli", "could", "do", "every", "for", "from", "get", "has", "have",
        "hey", "in", "is", "it", "me", "most", "my", "now", "of", "oldest",
        "on", "our", "over", "please", "recent", "right", "so", "stale",
        "that", "the", "this", "to", "use", "when", "with", "would", "you",
    }
)

# Filler pools for templated cases. Selection is seeded-rng driven, so two
# generators with different seeds phrase cases differently while keeping the
# same token skeleton.
OBJECT_POOL = ("quarterly summary", "billing ledger", "meeting minutes", "draft reply")
DEST_POOL = ("address", "mailbox", "recipient")
STORE_POOL = ("workspace", "library", "backlog")
PLACE_POOL = ("outbox", "address book", "sent folder", "settings page")
PROCESSOR_POOL = ("billing desk", "compliance team", "intake queue")
