"""The smallest univoque base q_s(x).

Outline of :func:`qs`:

* x = 1 and three values at q_KL are exceptional, with q_s(x) = q_KL;
* three intervals in (0, 1) have q_s(x) > q_KL and no value is computed;
* otherwise levels n = 1, 2, ... are scanned.  x lies in D_n (it has a
  unique expansion in some base of (q_{n-1}, q_n]) exactly when the
  lex-smallest level-n family member gamma with value above x at q_{n-1}
  has value at most x at q_n.  Any witness d satisfies
  d(q_n) <= x < d(q_{n-1}); since gamma <= d lexicographically and values
  follow lex order in this range, gamma(q_n) <= d(q_n) <= x.  At the first
  such level q_s(x) solves gamma(q) = x on (q_{n-1}, q_n].

Above z_1 and on [z_2, z_1) the answer also has a closed form, exposed
separately so the two can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Union

from .bases import MAX_LEVEL, BaseLadder, ladder_at, z1k_sequence, z_sequence
from .errors import BoundaryError, BracketError, DomainError, Undecided
from .family import GammaSearchResult, smallest_gamma
from .precise import (
    DEFAULT_TOL,
    Cmp,
    PreciseReal,
    RootInterval,
    adaptive,
    bisect_root,
    decide,
    eval_at,
    parse_exact,
    working_precision,
)
from .words import EventuallyPeriodicSeq

Real = Union[Fraction, int, str, PreciseReal]

PATH_LARGE = "closed-form-large"
PATH_MIDBAND = "closed-form-midband"
PATH_GENERAL = "general"
PATH_GAP = "gap-interval"
PATH_EXCEPTIONAL = "exceptional-point"
PATH_LEVEL_CAP = "level-cap"

MAX_K = 100_000


class Classification(str, Enum):
    BELOW_KL = "BelowKL"
    EQUAL_KL = "EqualKL"
    ABOVE_KL = "AboveKL"
    NEAR_KL = "NearKL"

    def __str__(self) -> str:
        return self.value


# sequences whose value at q_KL is an exceptional point (besides x = 1)
EXCEPTIONAL_SEQUENCES = {
    "0(01)^inf": EventuallyPeriodicSeq.parse("0(01)^inf"),
    "(01)^inf": EventuallyPeriodicSeq.parse("(01)^inf"),
    "(10)^inf": EventuallyPeriodicSeq.parse("(10)^inf"),
}


def _gap_left(k: int) -> EventuallyPeriodicSeq:
    return EventuallyPeriodicSeq((0,) * k, (1, 0))


def _gap_right(k: int) -> EventuallyPeriodicSeq:
    return EventuallyPeriodicSeq((0,) * (k - 1), (1, 0))


@dataclass(frozen=True)
class GapIntervals:
    """``[(0^k (10)^inf)_{q_G}, (0^{k-1} (10)^inf)_{q_KL})`` for k = 1, 2, 3."""

    intervals: tuple[tuple[PreciseReal, PreciseReal], ...]

    @classmethod
    def build(cls, ladder: BaseLadder | None = None) -> "GapIntervals":
        lad = ladder or ladder_at()
        return cls(tuple((eval_at(_gap_left(k), lad.q(1)), eval_at(_gap_right(k), lad.qkl)) for k in (1, 2, 3)))

    def __getitem__(self, k: int) -> tuple[PreciseReal, PreciseReal]:
        return self.intervals[k - 1]


@dataclass(frozen=True)
class InGap:
    k: int


@dataclass(frozen=True)
class Exceptional:
    which: str


@dataclass(frozen=True)
class Scannable:
    pass


Verdict = Union[InGap, Exceptional, Scannable]


def _as_input(x: Real) -> Fraction | PreciseReal:
    if isinstance(x, PreciseReal):
        if x.cmp(0) is not Cmp.GREATER:
            raise DomainError("x must be positive")
        return x
    v = parse_exact(x) if isinstance(x, str) else Fraction(x)
    if v <= 0:
        raise DomainError(f"x must be positive, got {v}")
    return v


def _enc(x: Fraction | PreciseReal) -> PreciseReal:
    return x if isinstance(x, PreciseReal) else PreciseReal.exact(x)


def _certified(computation: Callable, context: str):
    """Run with adaptive precision; persistent undecidability is a boundary error."""
    try:
        return adaptive(computation, error=BoundaryError)
    except BoundaryError as exc:
        raise BoundaryError(f"{context}: {exc.context}", exc.bits) from exc


def _classify_once(x: Fraction | PreciseReal) -> Verdict:
    if isinstance(x, Fraction) and x == 1:
        return Exceptional("1")
    lad = ladder_at(working_precision())
    xv = _enc(x)
    if isinstance(x, PreciseReal):
        # an inexact x can only be matched up to the working precision
        if xv.overlaps(1):
            return Exceptional("1")
        for name, seq in EXCEPTIONAL_SEQUENCES.items():
            if xv.overlaps(eval_at(seq, lad.qkl)):
                return Exceptional(name)
    if decide(xv, 1, "x against 1") is Cmp.GREATER:
        return Scannable()
    gaps = GapIntervals.build(lad)
    for k in (1, 2, 3):
        left, right = gaps[k]
        if decide(xv, left, f"x against left end of gap {k}") is Cmp.LESS:
            continue
        if decide(xv, right, f"x against right end of gap {k}") is Cmp.LESS:
            return InGap(k)
    return Scannable()


def classify(x: Real) -> Verdict:
    """Gap, exceptional point, or a value whose q_s is found by the level scan.

    Exact inputs are decided with adaptive precision.  The exceptional values
    other than 1 are irrational, so an exact rational x never equals one of
    them; an enclosure x that overlaps one at the working precision is
    reported as that exceptional point.
    """
    v = _as_input(x)
    if isinstance(v, PreciseReal):
        try:
            return _classify_once(v)
        except Undecided as exc:
            raise BoundaryError(f"classification: {exc.context}", working_precision()) from exc
    return _certified(lambda: _classify_once(v), "classification")


# --------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class QsResult:
    x: Fraction | PreciseReal
    classification: Classification
    path: str
    level: Optional[int] = None
    gamma: Optional[EventuallyPeriodicSeq] = None
    qs: Optional[RootInterval] = None
    gap: Optional[int] = None
    exceptional: Optional[str] = None
    bracket: Optional[tuple[PreciseReal, PreciseReal]] = None

    @property
    def value(self) -> Optional[PreciseReal]:
        return None if self.qs is None else self.qs.enclosure


# --------------------------------------------------------------------------
# root extraction


def _root(f: Callable[[PreciseReal], PreciseReal], lo, hi: PreciseReal, tol: Fraction, label: str) -> RootInterval:
    """Root of a decreasing f on [lo, hi], letting the right end spill by ``tol``.

    The right end is a base where f vanishes or is negative; when it vanishes
    (x equal to a family value at q_n) its sign cannot be certified, and the
    bracket is pushed one tolerance to the right instead.
    """
    try:
        return bisect_root(f, lo, hi, tol, label)
    except BracketError:
        hi2 = PreciseReal.exact(hi.bounds()[1] + tol)
        try:
            return bisect_root(f, lo, hi2, tol, label)
        except BracketError as exc:
            raise BoundaryError(f"{label}: no certified sign change", working_precision()) from exc


def _level_one_root(x: PreciseReal, hi: PreciseReal, tol: Fraction) -> RootInterval:
    one_inf = EventuallyPeriodicSeq((), (1,))
    eps = Fraction(1, 2)
    while True:
        lo = 1 + eps
        if (eval_at(one_inf, lo) - x).sign() is Cmp.GREATER:
            break
        eps /= 2
    return _root(lambda q: eval_at(one_inf, q) - x, lo, hi, tol, "q_s")


def membership_dn(x: Real, n: int, ladder: BaseLadder | None = None) -> bool:
    """Whether x lies in D_n, i.e. has a unique expansion in some base of (q_{n-1}, q_n]."""
    v = _as_input(x)
    return _membership(v, n, ladder)[0]


def _membership(v, n: int, ladder: BaseLadder | None = None) -> tuple[bool, Optional[GammaSearchResult]]:
    found = smallest_gamma(n, v, ladder)
    if not found:
        return False, None

    def check():
        lad = ladder or ladder_at(working_precision())
        if n > lad.depth:
            raise DomainError(f"level {n} base not available (ladder depth {lad.depth})")
        return decide(eval_at(found.gamma, lad.q(n)), _enc(v), f"gamma at q_{n} against x")

    verdict = _certified(check, f"level {n} membership")
    return verdict is Cmp.LESS, found


def _ladder_cap(max_level: int) -> int:
    return min(max_level, MAX_LEVEL, ladder_at(working_precision()).depth)


def qs(x: Real, tol=DEFAULT_TOL, max_level: int = MAX_LEVEL, method: str = "general") -> QsResult:
    """Smallest univoque base of x.

    ``method`` is ``"general"`` (always scan levels) or ``"auto"`` (use the
    closed forms above z_2 when they apply).
    """
    v = _as_input(x)
    tol = Fraction(tol) if not isinstance(tol, str) else parse_exact(tol)
    if method not in ("general", "auto"):
        raise DomainError(f"unknown method {method!r}")
    verdict = classify(v)
    lad = ladder_at(working_precision())
    if isinstance(verdict, Exceptional):
        return QsResult(v, Classification.EQUAL_KL, PATH_EXCEPTIONAL, qs=lad.kl, exceptional=verdict.which)
    if isinstance(verdict, InGap):
        return QsResult(v, Classification.ABOVE_KL, PATH_GAP, gap=verdict.k)
    if method == "auto":
        fast = _closed_form(v, tol)
        if fast is not None:
            return fast
    top = _ladder_cap(max_level)
    for n in range(1, top + 1):
        member, found = _membership(v, n)
        if not member:
            continue
        xv = _enc(v)
        if n == 1:
            root = _level_one_root(xv, lad.q(1), tol)
        else:
            gamma = found.gamma
            root = _root(lambda q: eval_at(gamma, q) - xv, lad.q(n - 1), lad.q(n), tol, "q_s")
        return QsResult(v, Classification.BELOW_KL, PATH_GENERAL, level=n, gamma=found.gamma, qs=root)
    lo = lad.q(top) if top >= 1 else PreciseReal.exact(1)
    return QsResult(v, Classification.NEAR_KL, PATH_LEVEL_CAP, bracket=(lo, lad.qkl))


# --------------------------------------------------------------------------
# closed forms


def _z1() -> PreciseReal:
    return eval_at(z_sequence(1), ladder_at(working_precision()).q(1))


def _z2() -> PreciseReal:
    return eval_at(z_sequence(2), ladder_at(working_precision()).q(2))


def _z1k(k: int) -> PreciseReal:
    return eval_at(z1k_sequence(k), ladder_at(working_precision()).q(1))


def _at_least(x, threshold: Callable[[], PreciseReal], context: str) -> bool:
    """x >= threshold, certified; an enclosure x overlapping the threshold counts as equal."""
    xv = _enc(x)
    if isinstance(x, PreciseReal):
        t = threshold()
        if xv.overlaps(t):
            return True
        return xv.cmp(t) is Cmp.GREATER
    return _certified(lambda: decide(xv, threshold(), context), context) is Cmp.GREATER


def qs_closed_large(x: Real) -> PreciseReal:
    """q_s(x) = 1/x + 1 for x >= z_1."""
    v = _as_input(x)
    if not _at_least(v, _z1, "x against z_1"):
        raise DomainError("closed form needs x >= z_1")
    return 1 + 1 / _enc(v)


def midband_k(x: Real) -> int:
    """Index of the partition cell of [z_2, z_1) holding x.

    The cells are [z_2, z_{1,2}) (k = 1) and [z_{1,k}, z_{1,k+1}) for k >= 2.
    """
    v = _as_input(x)
    if not _at_least(v, _z2, "x against z_2") or _at_least(v, _z1, "x against z_1"):
        raise DomainError("x must lie in [z_2, z_1)")
    k = 1
    while _at_least(v, lambda: _z1k(k + 1), f"x against z_1,{k + 1}"):
        k += 1
        if k > MAX_K:
            raise BoundaryError("x too close to z_1 for the midband partition", working_precision())
    return k


def midband_value(k: int, q: PreciseReal) -> PreciseReal:
    """``sum_{i <= k+1} q^{-i} + q^{-(k+1)} / (q^2 - 1)``."""
    inv = 1 / q
    total = PreciseReal.exact(0)
    power = PreciseReal.exact(1)
    for _ in range(k + 1):
        power = power * inv
        total = total + power
    return total + power / (q * q - 1)


def qs_closed_midband(x: Real, tol=DEFAULT_TOL) -> tuple[int, RootInterval]:
    """Partition index k and q_s(x) in (q_1, q_2] for x in [z_2, z_1)."""
    v = _as_input(x)
    tol = Fraction(tol) if not isinstance(tol, str) else parse_exact(tol)
    k = midband_k(v)
    lad = ladder_at(working_precision())
    xv = _enc(v)
    return k, _root(lambda q: midband_value(k, q) - xv, lad.q(1), lad.q(2), tol, f"q_s (k={k})")


def _closed_form(v, tol: Fraction) -> Optional[QsResult]:
    if _at_least(v, _z1, "x against z_1"):
        q = qs_closed_large(v)
        root = RootInterval(PreciseReal(q.lo, q.lo), PreciseReal(q.hi, q.hi), "q_s")
        return QsResult(v, Classification.BELOW_KL, PATH_LARGE, level=1, gamma=EventuallyPeriodicSeq((), (1,)), qs=root)
    if _at_least(v, _z2, "x against z_2"):
        k, root = qs_closed_midband(v, tol)
        return QsResult(v, Classification.BELOW_KL, PATH_MIDBAND, level=2, gamma=z1k_sequence(k + 1), qs=root)
    return None


__all__ = [
    "Classification",
    "Exceptional",
    "GapIntervals",
    "InGap",
    "QsResult",
    "Scannable",
    "classify",
    "membership_dn",
    "midband_k",
    "midband_value",
    "qs",
    "qs_closed_large",
    "qs_closed_midband",
]
