"""Smallest univoque bases q_s(x) over the binary alphabet.

The main entry point is :func:`qs`; see the submodules for the pieces:
``words`` (binary words and eventually periodic sequences), ``precise``
(interval arithmetic and root isolation), ``bases`` (the ladder q_n and
the constants z_n), ``family`` (automata for the unique-expansion
families), ``solver`` and ``oracle`` (brute-force expansion checks).
"""

__version__ = "0.1.0"

from .bases import BaseLadder, ZLadder, compute_qKL, compute_qn, compute_z1k, compute_zn, quasi_greedy_alpha
from .errors import BoundaryError, BracketError, DomainError, PrecisionError, SizeError, Undecided, UnivoqueError
from .family import FamilyAutomaton, build_automaton, extremal_continuations, is_member, smallest_gamma
from .oracle import expansion_branches, greedy_expansion, verify_uniqueness_at
from .precise import PreciseReal, RootInterval, bisect_root, eval_at, with_precision
from .solver import Classification, QsResult, classify, membership_dn, qs, qs_closed_large, qs_closed_midband
from .words import BinaryWord, EventuallyPeriodicSeq, lex_compare, reflect, thue_morse_prefix, word_minus, word_plus

__all__ = [
    "BaseLadder",
    "BinaryWord",
    "BoundaryError",
    "BracketError",
    "Classification",
    "DomainError",
    "EventuallyPeriodicSeq",
    "FamilyAutomaton",
    "PrecisionError",
    "PreciseReal",
    "QsResult",
    "RootInterval",
    "SizeError",
    "Undecided",
    "UnivoqueError",
    "ZLadder",
    "bisect_root",
    "build_automaton",
    "classify",
    "compute_qKL",
    "compute_qn",
    "compute_z1k",
    "compute_zn",
    "eval_at",
    "expansion_branches",
    "extremal_continuations",
    "greedy_expansion",
    "is_member",
    "lex_compare",
    "membership_dn",
    "qs",
    "qs_closed_large",
    "qs_closed_midband",
    "quasi_greedy_alpha",
    "reflect",
    "smallest_gamma",
    "thue_morse_prefix",
    "verify_uniqueness_at",
    "with_precision",
    "word_minus",
    "word_plus",
]
