"""Inclusion of right-linear μ- and μν-expressions by cyclic proofs."""

from .calculus import ProofGraph, Rule, Sequent, deserialize, parse_sequent, serialize
from .checker import CheckReport, check_progress
from .expr import Expr, parse, to_text
from .prover import Proved, Refuted, Rejected, prove
from .words import FiniteWord, LassoWord, parse_word

__all__ = [
    "CheckReport", "Expr", "FiniteWord", "LassoWord", "ProofGraph", "Proved",
    "Refuted", "Rejected", "Rule", "Sequent", "check_progress", "deserialize",
    "parse", "parse_sequent", "parse_word", "prove", "serialize", "to_text",
]
