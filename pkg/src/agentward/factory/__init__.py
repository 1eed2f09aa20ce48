"""Counterpart synthesis: threat model to refined enforcement skill."""

from .generate import (
    DeterministicGenerator,
    TRANSFORMS,
    obfuscate_base64,
    obfuscate_mixed_case,
    obfuscate_zero_width,
    phase3_generate_tests,
)
from .model import (
    CATEGORIES,
    CATEGORY_ADVERSARIAL,
    CATEGORY_BENIGN,
    CATEGORY_DIRECT,
    CATEGORY_NATURAL,
    CAUSE_AMBIGUITY,
    CAUSE_CLASSES,
    CAUSE_REASONING,
    CAUSE_SPEC_GAP,
    CaseRow,
    DEFAULT_COUNTS,
    EvalReport,
    FactoryConfig,
    RiskyOperation,
    RootCause,
    SpecDelta,
    SynthesisResult,
    TestCase,
    ThreatModel,
)
from .phases import (
    phase1_threat_model,
    phase2_write_spec,
    phase4_evaluate,
    phase5_root_cause,
    phase6_refine,
)
from .synth import synthesize_safe_skill
from .vocab import BENIGN_TAGS, RISK_TAGS, SYNONYMS

__all__ = [
    "BENIGN_TAGS",
    "CATEGORIES",
    "CATEGORY_ADVERSARIAL",
    "CATEGORY_BENIGN",
    "CATEGORY_DIRECT",
    "CATEGORY_NATURAL",
    "CAUSE_AMBIGUITY",
    "CAUSE_CLASSES",
    "CAUSE_REASONING",
    "CAUSE_SPEC_GAP",
    "CaseRow",
    "DEFAULT_COUNTS",
    "DeterministicGenerator",
    "EvalReport",
    "FactoryConfig",
    "RISK_TAGS",
    "RiskyOperation",
    "RootCause",
    "SpecDelta",
    "SYNONYMS",
    "SynthesisResult",
    "TRANSFORMS",
    "TestCase",
    "ThreatModel",
    "obfuscate_base64",
    "obfuscate_mixed_case",
    "obfuscate_zero_width",
    "phase1_threat_model",
    "phase2_write_spec",
    "phase3_generate_tests",
    "phase4_evaluate",
    "phase5_root_cause",
    "phase6_refine",
    "synthesize_safe_skill",
]
