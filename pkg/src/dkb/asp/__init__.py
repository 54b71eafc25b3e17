"""Grounding and answer-set search for the translated programs."""

from .grounding import GroundProgram, GroundingError, ground
from .kernels import HAVE_NUMBA, numba_enabled
from .solver import (
    AnswerSet,
    answer_sets,
    answer_sets_bruteforce,
    answer_sets_naive,
    consistent,
    is_answer_set,
    least_model,
    reduct,
    UnsupportedProgramError,
)

__all__ = [
    "AnswerSet", "GroundProgram", "GroundingError", "HAVE_NUMBA", "answer_sets",
    "answer_sets_bruteforce", "answer_sets_naive", "consistent", "ground",
    "is_answer_set", "least_model", "numba_enabled", "reduct", "UnsupportedProgramError",
]
