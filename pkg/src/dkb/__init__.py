"""Defeasible DL-Lite_R knowledge bases: parsing, normalization, safety
analysis, datalog translation, answer-set reasoning and a reference oracle."""

__version__ = "0.1.0"

from .dkbtext import DKBParseError, parse_assertion, parse_dkb, serialize_dkb
from .dlprog import assemble_program, emit_text
from .kb import DKB, Assertion, ClashingAssumption
from .normalize import normalize
from .reason import (
    ConjunctiveQuery,
    EntailmentResult,
    ReasoningError,
    certain_answers,
    entails,
    is_satisfiable,
    justified_assumptions,
    parse_query,
)
from .safety import SafetyReport, classify

__all__ = [
    "DKB", "Assertion", "ClashingAssumption", "ConjunctiveQuery", "DKBParseError",
    "EntailmentResult", "ReasoningError", "SafetyReport", "assemble_program",
    "certain_answers", "classify", "emit_text", "entails", "is_satisfiable",
    "justified_assumptions", "normalize", "parse_assertion", "parse_dkb",
    "parse_query", "serialize_dkb",
]
