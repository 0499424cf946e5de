"""Brute-force checks on expansions, independent of the family machinery.

Everything here runs on remainders ``r_k = q^k x - sum_{i<=k} d_i q^{k-i}``.
A prefix extends to a full expansion iff its remainder lies in
``[0, 1/(q-1)]``; from such a remainder digit 1 is feasible iff
``q r - 1 >= 0`` and digit 0 iff ``q (q - 1) r <= 1``.  When both are
feasible at some step, x has two expansions in base q.

Bases may be rationals or :class:`~univoque.algebraic.AlgebraicNumber`
(exact, never undecided) or interval enclosures.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

from .algebraic import AlgebraicNumber
from .errors import BoundaryError, DomainError
from .family import build_automaton, is_member
from .precise import Cmp, PreciseReal, RootInterval, eval_at, parse_exact, working_precision
from .words import BinaryWord, EventuallyPeriodicSeq

DEFAULT_DEPTH = 60
DEPTH_CAP = 10_000

Base = Union[Fraction, int, str, AlgebraicNumber, PreciseReal, RootInterval]


@dataclass(frozen=True)
class BranchNode:
    depth: int
    remainder: object
    digits: BinaryWord


@dataclass(frozen=True)
class Unique:
    depth: int
    kind = "Unique"


@dataclass(frozen=True)
class Multiple:
    depth: int
    kind = "Multiple"


@dataclass(frozen=True)
class Infeasible:
    kind = "Infeasible"


@dataclass(frozen=True)
class Undecided:
    depth: int
    kind = "Undecided"


BranchVerdict = Union[Unique, Multiple, Infeasible, Undecided]


def _base(q: Base):
    if isinstance(q, RootInterval):
        return q.enclosure
    if isinstance(q, str):
        return parse_exact(q)
    if isinstance(q, int):
        return Fraction(q)
    return q


def _check_range(q) -> None:
    if isinstance(q, PreciseReal):
        if q.cmp(1) is not Cmp.GREATER or q.cmp(2) is not Cmp.LESS:
            raise DomainError("base enclosure not inside (1, 2)")
    elif not (q > 1 and q < 2):
        raise DomainError("base not inside (1, 2)")


def _sign(v) -> Optional[int]:
    """Sign of an exact or interval quantity; ``None`` when undecided."""
    if isinstance(v, PreciseReal):
        c = v.sign()
        if c is Cmp.UNDECIDED:
            # a point enclosure of zero is an exact tie, not an undecided sign
            return 0 if v.is_point() else None
        return 1 if c is Cmp.GREATER else -1
    if isinstance(v, AlgebraicNumber):
        return v.sign()
    return (v > 0) - (v < 0)


def _lift(x, q):
    if isinstance(q, PreciseReal):
        return x if isinstance(x, PreciseReal) else PreciseReal.exact(x)
    if isinstance(q, AlgebraicNumber):
        return q.field.element(x)
    return Fraction(x)


def _feasible(r, q) -> tuple[Optional[bool], Optional[bool]]:
    """Feasibility of digits 1 and 0 from remainder r (None when undecided)."""
    s1 = _sign(q * r - 1)
    s0 = _sign(q * (q - 1) * r - 1)
    one = None if s1 is None else s1 >= 0
    zero = None if s0 is None else s0 <= 0
    return one, zero


def _in_range(x, q) -> Optional[bool]:
    lo = _sign(x)
    hi = _sign((q - 1) * x - 1)
    if lo is not None and lo < 0:
        return False
    if hi is not None and hi > 0:
        return False
    if lo is None or hi is None:
        return None
    return True


def expansion_branches(x, q: Base, depth: int = DEFAULT_DEPTH) -> BranchVerdict:
    """Follow the remainder dynamics of x in base q for ``depth`` digits.

    ``Multiple(k)``: both digits are feasible at step k, a certificate that x
    has at least two expansions.  ``Unique(depth)``: exactly one digit was
    feasible at every step, which only certifies uniqueness up to ``depth``.
    """
    if not 1 <= depth <= DEPTH_CAP:
        raise DomainError(f"depth must be in 1..{DEPTH_CAP}")
    q = _base(q)
    _check_range(q)
    if isinstance(x, str):
        x = parse_exact(x)
    r = _lift(x, q)
    ok = _in_range(r, q)
    if ok is None:
        return Undecided(0)
    if not ok:
        return Infeasible()
    for k in range(1, depth + 1):
        one, zero = _feasible(r, q)
        if one and zero:
            return Multiple(k)
        if one is None or zero is None:
            return Undecided(k)
        r = q * r - (1 if one else 0)
    return Unique(depth)


def branch_nodes(x, q: Base, depth: int, limit: int = 1 << 16) -> Iterator[BranchNode]:
    """All feasible prefixes of length ``depth`` (exact bases only)."""
    q = _base(q)
    _check_range(q)
    if isinstance(q, PreciseReal):
        raise DomainError("prefix enumeration needs an exact base")
    if isinstance(x, str):
        x = parse_exact(x)
    r0 = _lift(x, q)
    if not _in_range(r0, q):
        return
    stack = [BranchNode(0, r0, BinaryWord())]
    emitted = 0
    while stack:
        node = stack.pop()
        if node.depth == depth:
            yield node
            emitted += 1
            if emitted >= limit:
                return
            continue
        one, zero = _feasible(node.remainder, q)
        if zero:
            stack.append(BranchNode(node.depth + 1, q * node.remainder, node.digits + BinaryWord((0,))))
        if one:
            stack.append(BranchNode(node.depth + 1, q * node.remainder - 1, node.digits + BinaryWord((1,))))


def greedy_expansion(x, q: Base, count: int) -> BinaryWord:
    """Lexicographically largest expansion prefix: take 1 whenever feasible."""
    q = _base(q)
    _check_range(q)
    if isinstance(x, str):
        x = parse_exact(x)
    r = _lift(x, q)
    ok = _in_range(r, q)
    if ok is None:
        raise BoundaryError("x on the edge of the expansion range", working_precision(), index=0)
    if not ok:
        raise DomainError("x has no expansion in this base")
    digits = []
    for k in range(1, count + 1):
        s = _sign(q * r - 1)
        if s is None:
            raise BoundaryError(f"greedy digit {k} undecided", working_precision(), index=k)
        d = 1 if s >= 0 else 0
        digits.append(d)
        r = q * r - d
    return BinaryWord(tuple(digits))


@dataclass(frozen=True)
class UniquenessReport:
    verdict: str
    value_ok: Optional[bool]
    member_ok: Optional[bool]
    branches: BranchVerdict

    @property
    def passed(self) -> bool:
        return self.verdict == "Pass"


def verify_uniqueness_at(
    x,
    q: Base,
    depth: int = DEFAULT_DEPTH,
    gamma: EventuallyPeriodicSeq | None = None,
    level: int | None = None,
) -> UniquenessReport:
    """Cross-check a claimed unique expansion ``gamma`` of x in base q.

    Checks that gamma(q) encloses x, that gamma belongs to the level family
    (which makes it the only expansion for bases in (q_{level-1}, q_level]),
    and that the branch search finds no second expansion.  The branch search
    can only refute: running out of precision before ``depth`` does not fail
    the check.  Without ``gamma`` the verdict rests on the branch search alone.
    """
    q = _base(q)
    if isinstance(x, str):
        x = parse_exact(x)
    branches = expansion_branches(x, q, depth)
    if isinstance(branches, (Multiple, Infeasible)):
        return UniquenessReport("Fail", None, None, branches)
    if gamma is None:
        verdict = "Pass" if isinstance(branches, Unique) else "Undecided"
        return UniquenessReport(verdict, None, None, branches)
    if isinstance(q, AlgebraicNumber):
        qv = q.enclosure(working_precision())
    else:
        qv = q if isinstance(q, PreciseReal) else PreciseReal.exact(q)
    value_ok = eval_at(gamma, qv).overlaps(x if isinstance(x, PreciseReal) else PreciseReal.exact(x))
    member_ok = is_member(build_automaton(level), gamma) if level is not None else None
    if not value_ok or member_ok is False:
        return UniquenessReport("Fail", value_ok, member_ok, branches)
    return UniquenessReport("Pass", value_ok, member_ok, branches)
