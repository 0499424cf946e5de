"""Interval-backed reals, series evaluation and certified root isolation.

A :class:`PreciseReal` is a closed interval with dyadic endpoints that is
guaranteed to contain the real number it stands for.  All arithmetic rounds
outward (via mpmath's low-level interval routines, which take the precision
explicitly and keep no global state), so enclosures stay sound.

Comparisons are three-valued: ``LESS``/``GREATER`` only when the enclosures
are disjoint, ``UNDECIDED`` otherwise.  Algorithms that need a decision call
:func:`decide`, which raises :class:`~univoque.errors.Undecided`; wrapping
them in :func:`adaptive` retries at doubled precision up to the cap.
"""

from __future__ import annotations

import math
import re
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from enum import Enum
from fractions import Fraction
from typing import Callable, TypeVar, Union

from mpmath.libmp import (
    fhalf,
    finf,
    fninf,
    fone,
    from_int,
    from_rational,
    fzero,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_mul,
    mpf_sub,
    round_ceiling,
    round_floor,
    round_nearest,
    to_float,
    to_rational,
)
from mpmath.libmp.libmpi import mpi_add, mpi_div, mpi_mul, mpi_neg, mpi_pow_int, mpi_sub

from .errors import BracketError, DomainError, PrecisionError, Undecided
from .words import BinaryWord, EventuallyPeriodicSeq

DEFAULT_PRECISION = 128
MIN_PRECISION = 64
PRECISION_CAP = 4096
DEFAULT_TOL = 1e-12

_precision: ContextVar[int] = ContextVar("univoque_precision", default=DEFAULT_PRECISION)
_cap: ContextVar[int] = ContextVar("univoque_precision_cap", default=PRECISION_CAP)

T = TypeVar("T")


class Cmp(Enum):
    LESS = "less"
    GREATER = "greater"
    UNDECIDED = "undecided"


# --------------------------------------------------------------------------
# precision management


def working_precision() -> int:
    return _precision.get()


def precision_cap() -> int:
    return _cap.get()


def _check_bits(bits: int) -> None:
    if not MIN_PRECISION <= bits <= max(PRECISION_CAP, _cap.get()):
        raise DomainError(f"precision {bits} outside [{MIN_PRECISION}, {max(PRECISION_CAP, _cap.get())}]")


@contextmanager
def precision(bits: int):
    """Set the working precision (in bits) for the enclosed block."""
    _check_bits(bits)
    token = _precision.set(bits)
    try:
        yield bits
    finally:
        _precision.reset(token)


@contextmanager
def cap(bits: int):
    """Set the precision cap used by :func:`adaptive`."""
    if bits < MIN_PRECISION:
        raise DomainError(f"precision cap {bits} below {MIN_PRECISION}")
    token = _cap.set(bits)
    try:
        yield bits
    finally:
        _cap.reset(token)


def with_precision(bits: int, computation: Callable[[], T]) -> T:
    """Run ``computation()`` at working precision ``bits``."""
    with precision(bits):
        return computation()


def adaptive(
    computation: Callable[[], T],
    *,
    start: int | None = None,
    cap_bits: int | None = None,
    error: type[PrecisionError] = PrecisionError,
) -> T:
    """Run ``computation`` doubling the precision on :class:`Undecided`.

    Raises ``error`` (a :class:`PrecisionError` subclass) carrying the last
    undecided context once the cap is exceeded.
    """
    bits = start or working_precision()
    limit = cap_bits or precision_cap()
    while True:
        try:
            with precision(bits):
                return computation()
        except Undecided as exc:
            if bits >= limit:
                raise error(exc.context, bits) from exc
            bits = min(2 * bits, limit)


def bits_for_tol(tol: float | Fraction) -> int:
    """Working precision comfortably resolving absolute tolerance ``tol``."""
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    if tol >= 1:
        return MIN_PRECISION
    t = Fraction(tol)
    # ceil(-log2 t) from bit lengths, safe far below float range
    k = t.denominator.bit_length() - t.numerator.bit_length()
    while Fraction(1, 2**k) > t:
        k += 1
    while k > 0 and Fraction(1, 2 ** (k - 1)) <= t:
        k -= 1
    return max(MIN_PRECISION, k + 32)


# --------------------------------------------------------------------------
# exact inputs

_DECIMAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")
_RATIO = re.compile(r"[+-]?\d+/[+-]?\d+")


def parse_exact(text: str | int | Fraction) -> Fraction:
    """Parse a decimal string (``1.25``, ``-3e-7``) or a fraction ``p/q`` exactly."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    s = text.strip()
    if _DECIMAL.fullmatch(s):
        return Fraction(s)
    if _RATIO.fullmatch(s):
        num, den = s.split("/")
        if int(den) == 0:
            raise DomainError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    raise DomainError(f"not a decimal or fraction: {text!r}")


# --------------------------------------------------------------------------
# intervals

Number = Union[int, Fraction, "PreciseReal"]


@dataclass(frozen=True, slots=True)
class PreciseReal:
    """Closed interval ``[lo, hi]`` of raw mpmath floats enclosing a real.

    ``mid`` and ``rad`` give the midpoint-radius view.
    """

    lo: tuple
    hi: tuple

    # construction -------------------------------------------------------
    @classmethod
    def exact(cls, value: int | Fraction | str) -> "PreciseReal":
        """Enclosure of an exact rational at the working precision."""
        v = parse_exact(value) if isinstance(value, str) else Fraction(value)
        prec = working_precision()
        if v.denominator == 1:
            return cls(from_int(v.numerator, prec, round_floor), from_int(v.numerator, prec, round_ceiling))
        p, q = v.numerator, v.denominator
        return cls(from_rational(p, q, prec, round_floor), from_rational(p, q, prec, round_ceiling))

    @classmethod
    def point(cls, m: tuple) -> "PreciseReal":
        return cls(m, m)

    @classmethod
    def between(cls, lo: "PreciseReal", hi: "PreciseReal") -> "PreciseReal":
        """Hull of two enclosures."""
        a = lo.lo if mpf_cmp(lo.lo, hi.lo) <= 0 else hi.lo
        b = hi.hi if mpf_cmp(hi.hi, lo.hi) >= 0 else lo.hi
        return cls(a, b)

    # views -----------------------------------------------------------------
    @property
    def mid(self) -> tuple:
        return mpf_mul(mpf_add(self.lo, self.hi, working_precision() + 8, round_nearest), fhalf)

    @property
    def rad(self) -> tuple:
        return mpf_mul(mpf_sub(self.hi, self.lo, 64, round_ceiling), fhalf)

    @property
    def width(self) -> tuple:
        return mpf_sub(self.hi, self.lo, 64, round_ceiling)

    def __float__(self) -> float:
        return to_float(self.mid)

    def bounds(self) -> tuple[Fraction, Fraction]:
        return _to_fraction(self.lo), _to_fraction(self.hi)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, other: Number) -> bool:
        o = _coerce(other)
        return mpf_cmp(self.lo, o.lo) <= 0 and mpf_cmp(o.hi, self.hi) <= 0

    def overlaps(self, other: Number) -> bool:
        o = _coerce(other)
        return mpf_cmp(self.lo, o.hi) <= 0 and mpf_cmp(o.lo, self.hi) <= 0

    def __repr__(self) -> str:
        return f"PreciseReal([{_fmt(self.lo)}, {_fmt(self.hi)}])"

    def __str__(self) -> str:
        return render_decimal(self)

    # arithmetic ----------------------------------------------------------
    def _pair(self):
        return (self.lo, self.hi)

    def __add__(self, other: Number) -> "PreciseReal":
        return PreciseReal(*mpi_add(self._pair(), _coerce(other)._pair(), working_precision()))

    __radd__ = __add__

    def __sub__(self, other: Number) -> "PreciseReal":
        return PreciseReal(*mpi_sub(self._pair(), _coerce(other)._pair(), working_precision()))

    def __rsub__(self, other: Number) -> "PreciseReal":
        return _coerce(other) - self

    def __mul__(self, other: Number) -> "PreciseReal":
        return PreciseReal(*mpi_mul(self._pair(), _coerce(other)._pair(), working_precision()))

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "PreciseReal":
        return PreciseReal(*mpi_div(self._pair(), _coerce(other)._pair(), working_precision()))

    def __rtruediv__(self, other: Number) -> "PreciseReal":
        return _coerce(other) / self

    def __neg__(self) -> "PreciseReal":
        return PreciseReal(*mpi_neg(self._pair()))

    def __pow__(self, n: int) -> "PreciseReal":
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return 1 / self ** (-n)
        return PreciseReal(*mpi_pow_int(self._pair(), n, working_precision()))

    # comparisons ---------------------------------------------------------
    def cmp(self, other: Number) -> Cmp:
        o = _coerce(other)
        if mpf_cmp(self.hi, o.lo) < 0:
            return Cmp.LESS
        if mpf_cmp(self.lo, o.hi) > 0:
            return Cmp.GREATER
        return Cmp.UNDECIDED

    def sign(self) -> Cmp:
        return self.cmp(0)


def _coerce(x: Number) -> PreciseReal:
    if isinstance(x, PreciseReal):
        return x
    if isinstance(x, (int, Fraction)):
        return PreciseReal.exact(x)
    raise TypeError(f"cannot use {type(x).__name__} as a PreciseReal")


def _to_fraction(m: tuple) -> Fraction:
    if m in (finf, fninf):
        raise DomainError("unbounded enclosure")
    p, q = to_rational(m)
    return Fraction(int(p), int(q))


def _fmt(m: tuple) -> str:
    if m == finf:
        return "+inf"
    if m == fninf:
        return "-inf"
    return format(to_float(m), ".17g")


def compare(a: Number, b: Number) -> Cmp:
    return _coerce(a).cmp(b)


def decide(a: Number, b: Number, context: str = "") -> Cmp:
    """Like :func:`compare` but raise :class:`Undecided` instead of returning it."""
    c = _coerce(a).cmp(b)
    if c is Cmp.UNDECIDED:
        raise Undecided(context or "undecided comparison")
    return c


def render_decimal(x: PreciseReal, digits: int | None = None, max_digits: int = 40) -> str:
    """Midpoint as a decimal string, rounded half-even.

    Without ``digits`` the number of places is chosen so the enclosure width
    stays below one unit in the last printed place.
    """
    if digits is None:
        digits = certified_places(x, max_digits)
    mid = _to_fraction(x.mid)
    with localcontext() as ctx:
        ctx.prec = max(60, digits + 30)
        d = Decimal(mid.numerator) / Decimal(mid.denominator)
        q = Decimal(1).scaleb(-digits)
        return str(d.quantize(q, rounding=ROUND_HALF_EVEN))


def certified_places(x: PreciseReal, max_digits: int = 40) -> int:
    """Decimal places whose unit exceeds the enclosure width."""
    w = _to_fraction(x.width)
    if w == 0:
        return max_digits
    places = int(math.floor(-math.log10(w))) if w < 1 else 0
    # exact check against rounding in log10
    while places > 0 and Fraction(1, 10**places) <= w:
        places -= 1
    while places < max_digits and Fraction(1, 10 ** (places + 1)) > w:
        places += 1
    return max(0, min(places, max_digits))


# --------------------------------------------------------------------------
# series evaluation


def _point_word_value(digits, inv: PreciseReal) -> PreciseReal:
    acc = PreciseReal.point(fzero)
    one = PreciseReal.point(fone)
    for d in reversed(digits):
        acc = (acc + one) * inv if d else acc * inv
    return acc


def _point_seq_value(s: EventuallyPeriodicSeq, q: PreciseReal) -> PreciseReal:
    inv = 1 / q
    pre = _point_word_value(s.preamble, inv)
    cyc = _point_word_value(s.cycle, inv)
    denom = 1 - inv ** len(s.cycle)
    return pre + inv ** len(s.preamble) * cyc / denom


def _check_base(q: PreciseReal, allow_one: bool = False) -> None:
    lower_ok = mpf_cmp(q.lo, fone) >= 0 if allow_one else mpf_cmp(q.lo, fone) > 0
    if not lower_ok or mpf_cmp(q.hi, from_int(2)) >= 0:
        raise DomainError(f"base enclosure {q!r} not inside (1, 2)")


def eval_at(s: EventuallyPeriodicSeq, q: PreciseReal | Fraction | int) -> PreciseReal:
    """Enclosure of ``sum_{i>=1} d_i q^{-i}`` in closed (geometric) form.

    The value is decreasing in ``q``, so it is evaluated at the two endpoints
    of the base enclosure and the outer bounds are kept.
    """
    q = _coerce(q)
    _check_base(q)
    if q.is_point():
        return _point_seq_value(s, q)
    upper = _point_seq_value(s, PreciseReal.point(q.lo))
    lower = _point_seq_value(s, PreciseReal.point(q.hi))
    return PreciseReal(lower.lo, upper.hi)


def word_value(w: BinaryWord, q: PreciseReal | Fraction | int) -> PreciseReal:
    """Enclosure of the finite sum ``sum_{i<=len(w)} w_i q^{-i}`` for ``q >= 1``."""
    q = _coerce(q)
    if mpf_cmp(q.lo, fone) < 0:
        raise DomainError("word_value needs q >= 1")
    if q.is_point():
        return _point_word_value(w, 1 / q)
    upper = _point_word_value(w, 1 / PreciseReal.point(q.lo))
    lower = _point_word_value(w, 1 / PreciseReal.point(q.hi))
    return PreciseReal(lower.lo, upper.hi)


# --------------------------------------------------------------------------
# root isolation


@dataclass(frozen=True)
class RootInterval:
    """Certified bracket ``[lo, hi]`` (exact dyadic endpoints) of a simple root."""

    lo: PreciseReal
    hi: PreciseReal
    label: str = ""

    @property
    def enclosure(self) -> PreciseReal:
        return PreciseReal(self.lo.lo, self.hi.hi)

    @property
    def width(self) -> Fraction:
        a, b = self.enclosure.bounds()
        return b - a

    def __float__(self) -> float:
        return float(self.enclosure)

    def __str__(self) -> str:
        return render_decimal(self.enclosure)


def _probe(f: Callable[[PreciseReal], PreciseReal], x: tuple) -> tuple[int, tuple]:
    """Certified sign (0 when undecided) and midpoint value of ``f`` at ``x``."""
    v = f(PreciseReal.point(x))
    c = v.sign()
    s = 0 if c is Cmp.UNDECIDED else (1 if c is Cmp.GREATER else -1)
    return s, v.mid


def _endpoint(v: PreciseReal | Fraction | int | float, upper: bool) -> tuple:
    if isinstance(v, PreciseReal):
        return v.hi if upper else v.lo
    if isinstance(v, float):
        v = Fraction(v)
    v = Fraction(v)
    rnd = round_ceiling if upper else round_floor
    return from_rational(v.numerator, v.denominator, working_precision(), rnd)


def bisect_root(
    f: Callable[[PreciseReal], PreciseReal],
    lo: PreciseReal | Fraction | int | float,
    hi: PreciseReal | Fraction | int | float,
    tol: float | Fraction = DEFAULT_TOL,
    label: str = "",
) -> RootInterval:
    """Isolate the root of a monotone ``f`` in ``[lo, hi]`` to width ``tol``.

    ``f`` maps an exact point (a degenerate :class:`PreciseReal`) to an
    enclosure of its value.  Split points come from an Illinois-modified
    secant step, clamped away from the bracket ends, with bisection whenever
    the bracket shrinks too slowly; every accepted split has a certified sign,
    so the result always contains the root.  Enclosure endpoints are widened
    outward (``lo.lo``, ``hi.hi``).
    """
    need = bits_for_tol(tol)
    if need > precision_cap():
        raise PrecisionError(f"tolerance {tol} needs {need} bits, above the cap {precision_cap()}", need)
    prec = max(working_precision(), need)
    with precision(prec):
        return _illinois(f, _endpoint(lo, False), _endpoint(hi, True), Fraction(tol), label, prec)


def _illinois(f, a, b, tol: Fraction, label: str, prec: int) -> RootInterval:
    name = label or "root"
    if mpf_cmp(a, b) >= 0:
        raise BracketError(f"empty bracket for {name}")
    sa, fa = _probe(f, a)
    sb, fb = _probe(f, b)
    if sa == 0 or sb == 0 or sa == sb:
        raise BracketError(f"no certified sign change for {name} on the bracket")
    tol_m = from_rational(tol.numerator, tol.denominator, prec, round_floor)
    margin = mpf_mul(tol_m, fhalf)
    side = 0
    stall = 0
    while True:
        w = mpf_sub(b, a, prec, round_ceiling)
        if mpf_cmp(w, tol_m) <= 0:
            break
        denom = mpf_sub(fb, fa, prec)
        bisecting = stall >= 2 or denom == fzero
        if bisecting:
            c = mpf_mul(mpf_add(a, b, prec + 2), fhalf)
        else:
            c = mpf_sub(b, mpf_div(mpf_mul(fb, mpf_sub(b, a, prec), prec), denom, prec), prec)
            c_lo, c_hi = mpf_add(a, margin, prec), mpf_sub(b, margin, prec)
            if mpf_cmp(c, c_lo) < 0:
                c = c_lo
            elif mpf_cmp(c, c_hi) > 0:
                c = c_hi
        sc, fc = _probe(f, c)
        if sc == 0:
            # root within the evaluation noise of c: try to straddle it
            left = mpf_sub(c, margin, prec, round_floor)
            right = mpf_add(c, margin, prec, round_ceiling)
            if _probe(f, left)[0] == sa and _probe(f, right)[0] == sb:
                a, b = left, right
                break
            raise Undecided(f"sign of {name} undecided near {_fmt(c)}")
        if sc == sb:
            b, fb = c, fc
            if side == -1:
                fa = mpf_mul(fa, fhalf)
            side = -1
        else:
            a, fa = c, fc
            if side == 1:
                fb = mpf_mul(fb, fhalf)
            side = 1
        halved = mpf_cmp(mpf_mul(mpf_sub(b, a, prec, round_ceiling), from_int(2)), w) <= 0
        stall = 0 if (halved or bisecting) else stall + 1
    return RootInterval(PreciseReal.point(a), PreciseReal.point(b), label)
