"""Binary words, eventually periodic binary sequences and the Thue-Morse sequence.

Sequences are indexed from 1 when they stand for digit strings
``d_1 d_2 ...`` of an expansion; Python indexing (from 0) is used for the
underlying tuples.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum
from itertools import islice
from math import lcm
from typing import Iterable, Iterator

from .errors import DomainError, SizeError

THUE_MORSE_CAP = 2**20


class Order(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _check_digits(digits: tuple[int, ...]) -> None:
    for d in digits:
        if d != 0 and d != 1:
            raise DomainError(f"digit {d!r} is not 0 or 1")


@dataclass(frozen=True)
class BinaryWord:
    """A finite word over {0, 1}."""

    digits: tuple[int, ...] = ()

    def __post_init__(self):
        digits = tuple(int(d) for d in self.digits)
        _check_digits(digits)
        object.__setattr__(self, "digits", digits)

    @classmethod
    def parse(cls, text: str) -> "BinaryWord":
        if not re.fullmatch(r"[01]*", text):
            raise DomainError(f"not a binary word: {text!r}")
        return cls(tuple(int(c) for c in text))

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.digits)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return BinaryWord(self.digits[item])
        return self.digits[item]

    def __add__(self, other: "BinaryWord") -> "BinaryWord":
        return BinaryWord(self.digits + tuple(other))

    def __mul__(self, times: int) -> "BinaryWord":
        if times < 0:
            raise DomainError("negative word power")
        return BinaryWord(self.digits * times)

    __rmul__ = __mul__

    def __str__(self) -> str:
        return "".join(map(str, self.digits))

    def reflect(self) -> "BinaryWord":
        return reflect(self)

    def minus(self) -> "BinaryWord":
        return word_minus(self)

    def plus(self) -> "BinaryWord":
        return word_plus(self)


def reflect(w: BinaryWord) -> BinaryWord:
    """Digit-wise complement ``1 - d``."""
    return BinaryWord(tuple(1 - d for d in w))


def word_minus(w: BinaryWord) -> BinaryWord:
    """Decrement the last digit; the word must end in 1."""
    if len(w) == 0 or w[-1] != 1:
        raise DomainError(f"word_minus needs a word ending in 1, got {str(w)!r}")
    return BinaryWord(w.digits[:-1] + (0,))


def word_plus(w: BinaryWord) -> BinaryWord:
    """Increment the last digit; the word must end in 0."""
    if len(w) == 0 or w[-1] != 0:
        raise DomainError(f"word_plus needs a word ending in 0, got {str(w)!r}")
    return BinaryWord(w.digits[:-1] + (1,))


def thue_morse_digit(index: int) -> int:
    """Parity of the number of 1-bits of ``index``."""
    if index < 0:
        raise DomainError("Thue-Morse index must be nonnegative")
    return bin(index).count("1") & 1


def thue_morse_prefix(n: int, cap: int = THUE_MORSE_CAP) -> BinaryWord:
    """The first ``n`` Thue-Morse digits ``tau_0 ... tau_{n-1}``, built by doubling."""
    if n < 1:
        raise DomainError("thue_morse_prefix needs n >= 1")
    if n > cap:
        raise SizeError(f"Thue-Morse prefix of length {n} exceeds cap {cap}")
    digits = [0]
    while len(digits) < n:
        digits.extend([1 - d for d in digits])
    return BinaryWord(tuple(digits[:n]))


def tau_word(length: int) -> BinaryWord:
    """``tau_1 ... tau_length`` (the leading ``tau_0 = 0`` dropped)."""
    if length == 0:
        return BinaryWord()
    return thue_morse_prefix(length + 1)[1:]


def _primitive_root(cycle: tuple[int, ...]) -> tuple[int, ...]:
    n = len(cycle)
    for p in range(1, n):
        if n % p == 0 and cycle[:p] * (n // p) == cycle:
            return cycle[:p]
    return cycle


@dataclass(frozen=True)
class EventuallyPeriodicSeq:
    """The infinite sequence ``preamble cycle cycle cycle ...``.

    Instances are kept canonical: the cycle is primitive and the preamble is
    as short as possible, so equal digit streams compare equal and hash alike.
    """

    preamble: tuple[int, ...]
    cycle: tuple[int, ...]

    def __post_init__(self):
        pre = tuple(int(d) for d in self.preamble)
        cyc = tuple(int(d) for d in self.cycle)
        if not cyc:
            raise DomainError("cycle must be nonempty")
        _check_digits(pre)
        _check_digits(cyc)
        cyc = _primitive_root(cyc)
        while pre and pre[-1] == cyc[-1]:
            pre = pre[:-1]
            cyc = cyc[-1:] + cyc[:-1]
        object.__setattr__(self, "preamble", pre)
        object.__setattr__(self, "cycle", cyc)

    @classmethod
    def of(cls, preamble: Iterable[int] | str = (), cycle: Iterable[int] | str = (0,)) -> "EventuallyPeriodicSeq":
        if isinstance(preamble, str):
            preamble = BinaryWord.parse(preamble)
        if isinstance(cycle, str):
            cycle = BinaryWord.parse(cycle)
        return cls(tuple(preamble), tuple(cycle))

    @classmethod
    def parse(cls, text: str) -> "EventuallyPeriodicSeq":
        """Parse the ``PREAMBLE(CYCLE)^inf`` rendering."""
        m = re.fullmatch(r"\s*([01]*)\(([01]+)\)\^inf\s*", text)
        if not m:
            raise DomainError(f"cannot parse sequence {text!r}; expected PREAMBLE(CYCLE)^inf")
        return cls.of(m.group(1), m.group(2))

    def __str__(self) -> str:
        pre = "".join(map(str, self.preamble))
        cyc = "".join(map(str, self.cycle))
        return f"{pre}({cyc})^inf"

    def __repr__(self) -> str:
        return f"EventuallyPeriodicSeq({str(self)!r})"

    def digit(self, i: int) -> int:
        """Digit at 0-based position ``i`` (that is, ``d_{i+1}``)."""
        p = len(self.preamble)
        if i < p:
            return self.preamble[i]
        return self.cycle[(i - p) % len(self.cycle)]

    def __iter__(self) -> Iterator[int]:
        yield from self.preamble
        while True:
            yield from self.cycle

    def prefix(self, n: int) -> BinaryWord:
        return BinaryWord(tuple(islice(self, n)))

    def prepend(self, word: Iterable[int]) -> "EventuallyPeriodicSeq":
        return EventuallyPeriodicSeq(tuple(word) + self.preamble, self.cycle)

    def shift(self, k: int) -> "EventuallyPeriodicSeq":
        """Drop the first ``k`` digits."""
        p = len(self.preamble)
        if k <= p:
            return EventuallyPeriodicSeq(self.preamble[k:], self.cycle)
        r = (k - p) % len(self.cycle)
        return EventuallyPeriodicSeq((), self.cycle[r:] + self.cycle[:r])

    def reflect(self) -> "EventuallyPeriodicSeq":
        return EventuallyPeriodicSeq(tuple(1 - d for d in self.preamble), tuple(1 - d for d in self.cycle))

    def comparison_bound(self, other: "EventuallyPeriodicSeq") -> int:
        """Number of leading digits that decides the lexicographic order."""
        return max(len(self.preamble), len(other.preamble)) + lcm(len(self.cycle), len(other.cycle))


def lex_compare(s: EventuallyPeriodicSeq, t: EventuallyPeriodicSeq) -> Order:
    """Exact lexicographic comparison of two eventually periodic sequences."""
    for a, b in islice(zip(s, t), s.comparison_bound(t)):
        if a != b:
            return Order.LESS if a < b else Order.GREATER
    return Order.EQUAL

