from .bfa import BfaAnalyzer, MethodResult, Summary, analyze_program, compose, seed_triple
from .dfa import DfaAnalyzer, dfa_analyze_program, join_dfa_state
from .model import ProgramModel, TypestateWarning, sorted_warnings

Warning = TypestateWarning

__all__ = [
    "BfaAnalyzer",
    "DfaAnalyzer",
    "MethodResult",
    "ProgramModel",
    "Summary",
    "TypestateWarning",
    "Warning",
    "analyze_program",
    "compose",
    "dfa_analyze_program",
    "join_dfa_state",
    "seed_triple",
    "sorted_warnings",
]
