"""Script gating: source-to-sink flow analysis, attack tokens, mutants."""

from .analysis import Flow, ScriptAnalysis, analyze_script
from .gate import gate_execution
from .mutate import OPERATOR_IDS, OPERATORS, MutationOperator, mutate
from .seeds import SeedCase, load_seed_corpus

__all__ = [
    "Flow",
    "ScriptAnalysis",
    "analyze_script",
    "gate_execution",
    "OPERATOR_IDS",
    "OPERATORS",
    "MutationOperator",
    "mutate",
    "SeedCase",
    "load_seed_corpus",
]
