"""Exact arithmetic in Q(theta) for a real algebraic theta.

Several bases of interest (the golden ratio, the ladder roots q_n) make
digit comparisons tie *exactly*: the quasi-greedy expansion of 1 in base
q_n, or the greedy expansion of 1 in base q_2, hit partial sums equal to 1.
Interval arithmetic can never decide such ties, so expansion routines also
accept an :class:`AlgebraicNumber` base.

Elements are polynomials in theta with rational coefficients reduced modulo
the monic defining polynomial.  Sign determination first tries interval
evaluation; if that stays undecided it runs an exact zero test (a gcd with
the defining polynomial, then deciding which factor vanishes at theta, which
works because theta is a simple root) and, for nonzero elements, refines
the enclosure until the sign separates.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Sequence, Union

import sympy

from .errors import DomainError, PrecisionError
from .precise import PRECISION_CAP, Cmp, PreciseReal, bisect_root, precision

_SIGN_CAP = PRECISION_CAP

Scalar = Union[int, Fraction]


def _trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_eval(coeffs: Sequence[Scalar], x: PreciseReal) -> PreciseReal:
    acc = PreciseReal.exact(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class AlgebraicField:
    """Q(theta) where theta is the unique root of ``poly`` in ``(lo, hi)``.

    ``poly`` is given by integer coefficients from lowest to highest degree
    and must be monic with ``theta`` a simple root.
    """

    def __init__(self, poly: Sequence[int], lo: Scalar, hi: Scalar, name: str = "theta"):
        poly = [int(c) for c in poly]
        _trim(poly)
        if len(poly) < 2 or poly[-1] != 1:
            raise DomainError("defining polynomial must be monic of degree >= 1")
        self.poly = tuple(poly)
        self.degree = len(poly) - 1
        self.lo, self.hi = Fraction(lo), Fraction(hi)
        self.name = name
        self._enclosures: dict[int, PreciseReal] = {}
        self._lock = threading.Lock()
        with precision(128):
            s_lo = _poly_eval(self.poly, PreciseReal.exact(self.lo)).sign()
            s_hi = _poly_eval(self.poly, PreciseReal.exact(self.hi)).sign()
        if Cmp.UNDECIDED in (s_lo, s_hi) or s_lo == s_hi:
            raise DomainError(f"({self.lo}, {self.hi}) does not isolate a sign change of the polynomial")

    def __repr__(self) -> str:
        return f"AlgebraicField({self.name}, degree={self.degree})"

    @property
    def generator(self) -> "AlgebraicNumber":
        return AlgebraicNumber(self, (0, 1))

    def element(self, value: "Scalar | AlgebraicNumber") -> "AlgebraicNumber":
        if isinstance(value, AlgebraicNumber):
            if value.field is not self:
                raise DomainError("elements of different fields")
            return value
        return AlgebraicNumber(self, (Fraction(value),))

    def enclosure(self, bits: int) -> PreciseReal:
        """Enclosure of theta of width about ``2**-(bits - 8)``."""
        with self._lock:
            hit = self._enclosures.get(bits)
        if hit is not None:
            return hit
        with precision(bits):
            root = bisect_root(
                lambda t: _poly_eval(self.poly, t),
                self.lo,
                self.hi,
                Fraction(1, 2 ** (bits - 8)),
                self.name,
            )
            enc = root.enclosure
        with self._lock:
            self._enclosures[bits] = enc
        return enc

    def reduce(self, coeffs: Sequence[Scalar]) -> tuple:
        c = [Fraction(x) for x in coeffs]
        d = self.degree
        for k in range(len(c) - 1, d - 1, -1):
            lead = c[k]
            if lead:
                for i, p in enumerate(self.poly):
                    c[k - d + i] -= lead * p
        return tuple(_trim(c[:d]))

    def _vanishes_at_theta(self, factor: sympy.Poly) -> bool:
        """Whether a factor of the defining polynomial vanishes at theta."""
        t = sympy.Symbol("t")
        whole = sympy.Poly(list(reversed(self.poly)), t, domain="QQ")
        other = whole.quo(factor)
        f_coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(factor.all_coeffs())]
        o_coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(other.all_coeffs())]
        bits = 128
        while bits <= _SIGN_CAP:
            theta = self.enclosure(bits)
            with precision(bits):
                if _poly_eval(o_coeffs, theta).sign() is not Cmp.UNDECIDED:
                    return True
                if _poly_eval(f_coeffs, theta).sign() is not Cmp.UNDECIDED:
                    return False
            bits *= 2
        raise PrecisionError(f"could not separate the factors of the {self.name} polynomial", bits)

    def is_zero(self, coeffs: Sequence[Fraction]) -> bool:
        if not coeffs:
            return True
        t = sympy.Symbol("t")
        p = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], t, domain="QQ")
        whole = sympy.Poly(list(reversed(self.poly)), t, domain="QQ")
        g = p.gcd(whole)
        if g.degree() < 1:
            return False
        return self._vanishes_at_theta(g)

    def sign(self, coeffs: Sequence[Fraction]) -> int:
        if not coeffs:
            return 0
        bits = 64
        tested_zero = False
        while bits <= _SIGN_CAP:
            theta = self.enclosure(bits)
            with precision(bits):
                c = _poly_eval(coeffs, theta).sign()
            if c is Cmp.GREATER:
                return 1
            if c is Cmp.LESS:
                return -1
            if not tested_zero and bits >= 256:
                if self.is_zero(coeffs):
                    return 0
                tested_zero = True
            bits *= 2
        raise PrecisionError(f"sign in Q({self.name}) undecided", bits)


class AlgebraicNumber:
    """Element of an :class:`AlgebraicField`; exact and totally ordered."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: AlgebraicField, coeffs: Sequence[Scalar]):
        self.field = field
        self.coeffs = field.reduce(coeffs)

    def _other(self, other) -> "AlgebraicNumber":
        if isinstance(other, AlgebraicNumber):
            if other.field is not self.field:
                raise DomainError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return AlgebraicNumber(self.field, (other,))
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        n = max(len(self.coeffs), len(o.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(o.coeffs) + [0] * (n - len(o.coeffs))
        return AlgebraicNumber(self.field, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicNumber(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if not self.coeffs or not o.coeffs:
            return AlgebraicNumber(self.field, ())
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(o.coeffs):
                    out[i + j] += x * y
        return AlgebraicNumber(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "AlgebraicNumber":
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = AlgebraicNumber(self.field, (1,))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def sign(self) -> int:
        return self.field.sign(self.coeffs)

    def _cmp(self, other) -> int:
        o = self._other(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare with {type(other).__name__}")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (AlgebraicNumber, int, Fraction)):
            return NotImplemented
        return self._cmp(other) == 0

    __hash__ = None

    def enclosure(self, bits: int = 128) -> PreciseReal:
        theta = self.field.enclosure(bits)
        with precision(bits):
            return _poly_eval(self.coeffs, theta)

    def __float__(self) -> float:
        return float(self.enclosure())

    def __repr__(self) -> str:
        terms = " + ".join(f"{c}*{self.field.name}^{i}" for i, c in enumerate(self.coeffs) if c) or "0"
        return f"AlgebraicNumber({terms})"


def golden_field() -> AlgebraicField:
    """Q(sqrt 5) generated by the golden ratio, root of t^2 - t - 1."""
    return AlgebraicField((-1, -1, 1), 1, 2, "q_G")
