"""The base ladder q_1 < q_2 < ... -> q_KL and the threshold constants z_n, z_{1,k}.

q_n is the root in (1, 2) of ``1 = sum_{i <= 2^n} tau_i q^{-i}``; q_1 is the
golden ratio.  The sequence increases to the Komornik-Loreti constant very
fast (``q_KL - q_n`` roughly squares at each step), so only the first few
levels can be told apart from q_KL at any fixed working precision.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .algebraic import AlgebraicField, AlgebraicNumber
from .errors import BoundaryError, DomainError, PrecisionError
from .precise import (
    DEFAULT_TOL,
    Cmp,
    PreciseReal,
    RootInterval,
    _check_base,
    bisect_root,
    eval_at,
    parse_exact,
    precision,
    precision_cap,
    word_value,
    working_precision,
)
from .words import BinaryWord, EventuallyPeriodicSeq, tau_word

MAX_LEVEL = 20
KL_GAP = 1e-14

Base = Union[PreciseReal, RootInterval, Fraction, int, AlgebraicNumber]


def _tol(tol) -> Fraction:
    t = parse_exact(tol) if isinstance(tol, str) else Fraction(tol)
    if t <= 0:
        raise DomainError("tolerance must be positive")
    return t


def _ladder_poly_value(n: int):
    word = tau_word(2**n)

    def f(q: PreciseReal) -> PreciseReal:
        return 1 - word_value(word, q)

    return f


@lru_cache(maxsize=256)
def _compute_qn(n: int, tol: Fraction, bits: int) -> RootInterval:
    with precision(bits):
        return bisect_root(_ladder_poly_value(n), Fraction(3, 2), 2, tol, f"q_{n}")


def compute_qn(n: int, tol=DEFAULT_TOL) -> RootInterval:
    """Bracket of width at most ``tol`` around q_n."""
    if not 1 <= n <= MAX_LEVEL:
        raise DomainError(f"level {n} outside 1..{MAX_LEVEL}")
    return _compute_qn(n, _tol(tol), working_precision())


def _kl_terms(tol: Fraction) -> int:
    # q >= 1.7 on the bracket, so the tail after m terms is below 1.7^-m / 0.7
    bits = tol.denominator.bit_length() - tol.numerator.bit_length() + 6
    return max(8, int(math.ceil(bits / math.log2(1.7))) + 1)


@lru_cache(maxsize=64)
def _compute_qkl(tol: Fraction, bits: int) -> RootInterval:
    m = _kl_terms(tol)
    word = tau_word(m)

    def f(q: PreciseReal) -> PreciseReal:
        head = 1 - word_value(word, q)
        tail = (1 / q) ** m / (q - 1)
        return PreciseReal((head - tail).lo, head.hi)

    with precision(bits):
        return bisect_root(f, Fraction(17, 10), Fraction(19, 10), tol, "q_KL")


def compute_qKL(tol=DEFAULT_TOL) -> RootInterval:
    """Bracket around the Komornik-Loreti constant.

    The Thue-Morse series is cut after m terms and the remainder, at most
    ``q^-m / (q - 1)``, is folded into the function enclosure.
    """
    return _compute_qkl(_tol(tol), working_precision())


@lru_cache(maxsize=32)
def ladder_field(n: int) -> AlgebraicField:
    """Q(q_n), with q_n the root in (1, 2) of ``t^{2^n} - sum tau_i t^{2^n - i}``."""
    if not 1 <= n <= MAX_LEVEL:
        raise DomainError(f"level {n} outside 1..{MAX_LEVEL}")
    size = 2**n
    word = tau_word(size)
    coeffs = [0] * (size + 1)
    coeffs[size] = 1
    for i, t in enumerate(word, start=1):
        coeffs[size - i] -= t
    return AlgebraicField(coeffs, 1, 2, f"q_{n}")


def alpha_word(n: int) -> BinaryWord:
    """The cycle ``(tau_1 ... tau_{2^n})^-`` of the quasi-greedy expansion of 1 at q_n."""
    return tau_word(2**n).minus()


# --------------------------------------------------------------------------
# quasi-greedy expansions


def _qg_exact(x, q, count: int) -> BinaryWord:
    # remainder form: r_0 = x, digit 1 iff q r - 1 > 0, r <- q r - d
    digits = []
    r = q * 0 + x
    for _ in range(count):
        t = q * r
        d = 1 if t - 1 > 0 else 0
        digits.append(d)
        r = t - d
    return BinaryWord(tuple(digits))


def _qg_interval(x: Fraction, q: PreciseReal, count: int) -> BinaryWord:
    _check_base(q)
    target = PreciseReal.exact(x)
    inv = 1 / q
    power = PreciseReal.exact(1)
    partial = PreciseReal.exact(0)
    digits = []
    for k in range(1, count + 1):
        power = power * inv
        c = (partial + power).cmp(target)
        if c is Cmp.UNDECIDED:
            raise BoundaryError(
                f"quasi-greedy digit {k} undecided: partial sum touches x within the base enclosure",
                working_precision(),
                index=k,
            )
        if c is Cmp.LESS:
            partial = partial + power
            digits.append(1)
        else:
            digits.append(0)
    return BinaryWord(tuple(digits))


def quasi_greedy_expansion(x, q: Base, count: int) -> BinaryWord:
    """First ``count`` digits of the quasi-greedy expansion of ``x > 0`` in base q.

    Each digit is the largest one keeping the partial sum strictly below x.
    Rational and :class:`AlgebraicNumber` bases are handled exactly; for an
    interval base a digit that cannot be decided raises
    :class:`BoundaryError` with the digit index.
    """
    if count < 0:
        raise DomainError("count must be nonnegative")
    x = parse_exact(x) if isinstance(x, str) else Fraction(x)
    if x <= 0:
        raise DomainError("quasi-greedy expansions need x > 0")
    if isinstance(q, (int, float, str)):
        q = parse_exact(q) if isinstance(q, str) else Fraction(q)
    if isinstance(q, Fraction):
        if not 1 < q < 2:
            raise DomainError(f"base {q} not inside (1, 2)")
        if (q - 1) * x > 1:
            raise DomainError("x has no expansion in this base")
        return _qg_exact(x, q, count)
    if isinstance(q, AlgebraicNumber):
        if not (q > 1 and q < 2):
            raise DomainError("base not inside (1, 2)")
        if (q - 1) * x - 1 > 0:
            raise DomainError("x has no expansion in this base")
        return _qg_exact(x, q, count)
    if isinstance(q, RootInterval):
        q = q.enclosure
    return _qg_interval(x, q, count)


def quasi_greedy_alpha(q: Base, count: int) -> BinaryWord:
    """First ``count`` digits of alpha(q), the quasi-greedy expansion of 1."""
    return quasi_greedy_expansion(1, q, count)


# --------------------------------------------------------------------------
# thresholds


def z_sequence(n: int) -> EventuallyPeriodicSeq:
    """``tau_1 ... tau_{2^{n-1}} (reflect(tau_1 ... tau_{2^{n-1}})^+)^inf``."""
    if n < 1:
        raise DomainError("z_n needs n >= 1")
    head = tau_word(2 ** (n - 1))
    return EventuallyPeriodicSeq(head.digits, head.reflect().plus().digits)


def z1k_sequence(k: int) -> EventuallyPeriodicSeq:
    """``1^k (01)^inf``."""
    if k < 1:
        raise DomainError("z_{1,k} needs k >= 1")
    return EventuallyPeriodicSeq((1,) * k, (0, 1))


def compute_zn(n: int, tol=DEFAULT_TOL) -> PreciseReal:
    return eval_at(z_sequence(n), compute_qn(n, tol).enclosure)


def compute_z1k(k: int, tol=DEFAULT_TOL) -> PreciseReal:
    return eval_at(z1k_sequence(k), compute_qn(1, tol).enclosure)


# --------------------------------------------------------------------------
# cached ladders


@dataclass(frozen=True)
class BaseLadder:
    """Enclosures of q_1, ..., q_N and q_KL, all pairwise separated.

    Levels stop once q_KL - q_n drops below ``kl_gap`` (or at
    ``max_level``); deeper levels cannot be separated from q_KL at the
    tolerance in use anyway.
    """

    levels: tuple[RootInterval, ...]
    kl: RootInterval
    tol: Fraction

    @classmethod
    def build(cls, tol=DEFAULT_TOL, max_level: int = MAX_LEVEL, kl_gap=KL_GAP) -> "BaseLadder":
        tol = _tol(tol)
        kl = compute_qKL(tol)
        gap = Fraction(kl_gap)
        levels = []
        prev_hi = Fraction(1)
        for n in range(1, max_level + 1):
            r = compute_qn(n, tol)
            lo, hi = r.enclosure.bounds()
            if lo <= prev_hi or kl.enclosure.bounds()[0] - hi <= 0:
                break
            levels.append(r)
            prev_hi = hi
            if kl.enclosure.bounds()[0] - hi < gap:
                break
        return cls(tuple(levels), kl, tol)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def q(self, n: int) -> PreciseReal:
        """Enclosure of q_n; q_0 = 1 exactly."""
        if n == 0:
            return PreciseReal.exact(1)
        if not 1 <= n <= self.depth:
            raise DomainError(f"level {n} not in the ladder (depth {self.depth})")
        return self.levels[n - 1].enclosure

    @property
    def qkl(self) -> PreciseReal:
        return self.kl.enclosure


_ladders: dict[tuple[int, Fraction], BaseLadder] = {}
_ladders_lock = threading.Lock()


def ladder_at(bits: int | None = None, kl_gap=KL_GAP) -> BaseLadder:
    """Process-wide ladder with tolerance ``2^-(bits - 40)``."""
    bits = bits or working_precision()
    key = (bits, Fraction(kl_gap))
    with _ladders_lock:
        hit = _ladders.get(key)
        if hit is None:
            with precision(bits):
                hit = BaseLadder.build(Fraction(1, 2 ** (bits - 40)), MAX_LEVEL, kl_gap)
            _ladders[key] = hit
    return hit


@dataclass(frozen=True)
class ZLadder:
    """Enclosures of z_1, ..., z_N and z_{1,1}, ..., z_{1,K}."""

    z: tuple[PreciseReal, ...]
    z1k: tuple[PreciseReal, ...]

    @classmethod
    def build(cls, levels: int = 10, ks: int = 20, tol=DEFAULT_TOL) -> "ZLadder":
        return cls(
            tuple(compute_zn(n, tol) for n in range(1, levels + 1)),
            tuple(compute_z1k(k, tol) for k in range(1, ks + 1)),
        )

    @classmethod
    def certified(cls, levels: int = 10, ks: int = 20, start: int = 128) -> "ZLadder":
        """Build at rising precision until every ordering is certified.

        That is z_1 > z_2 > ... > z_levels > 1 and
        z_{1,2} < ... < z_{1,ks} < z_1, with z_2 < z_{1,2}.
        """
        bits = start
        while True:
            with precision(bits):
                zl = cls.build(levels, ks, Fraction(1, 2 ** (bits - 40)))
                if zl.ordered():
                    return zl
            if bits >= precision_cap():
                raise PrecisionError("z ladder orderings undecided", bits)
            bits = min(2 * bits, precision_cap())

    def ordered(self) -> bool:
        z, w = self.z, self.z1k
        ok = all(z[i + 1].cmp(z[i]) is Cmp.LESS for i in range(len(z) - 1))
        ok = ok and all(v.cmp(1) is Cmp.GREATER for v in z)
        ok = ok and all(w[i + 1].cmp(w[i]) is Cmp.GREATER for i in range(len(w) - 1))
        ok = ok and all(v.cmp(z[0]) is Cmp.LESS for v in w)
        if len(z) > 1 and len(w) > 1:
            ok = ok and z[1].cmp(w[1]) is Cmp.LESS
        return ok

    def zn(self, n: int) -> PreciseReal:
        return self.z[n - 1]

    def z1(self, k: int) -> PreciseReal:
        return self.z1k[k - 1]
