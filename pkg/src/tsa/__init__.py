"""Typestate checking of method-ordering contracts written as enable/disable annotations."""

from .analysis import analyze_program, dfa_analyze_program
from .automata import expand_dfa, minimize_dfa
from .contracts import BfaTriple, ContractMap, build_contract
from .frontend import parse_program

__version__ = "0.1.0"

__all__ = [
    "BfaTriple",
    "ContractMap",
    "analyze_program",
    "build_contract",
    "dfa_analyze_program",
    "expand_dfa",
    "minimize_dfa",
    "parse_program",
]
