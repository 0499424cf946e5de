"""Automata for the families of unique expansions at the ladder bases.

At level n the family consists of the sequences

    B_1^{a_1} B_2^{a_2} ... B_{j-1}^{a_{j-1}} B_j^inf      (1 <= j <= n, a_i >= 0)

with blocks ``B_m = (tau_1 ... tau_{2^{m-1}})^-``, together with their
reflections.  B_1 = 0, so 0^inf and 1^inf are members at every level.

Reading such a sequence left to right only needs the index floor ``jmin``
(block indices never decrease) and the offset ``p`` inside the current
block.  Since ``B_{m+1}`` starts with ``B_m^+``, at an offset ``2^{m-1}``
with ``m >= jmin`` the digit 0 closes a block B_m and the digit 1 carries on
into a longer block.  Every other position is forced to ``tau_{p+1}``.
Because no state is a dead end and block indices are bounded by n, every
infinite run spells a member, so all states are accepting.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Union

from .bases import MAX_LEVEL, BaseLadder, ladder_at
from .errors import BoundaryError, DomainError, Undecided
from .precise import Cmp, PreciseReal, adaptive, decide, eval_at, working_precision
from .words import EventuallyPeriodicSeq, thue_morse_digit

D_MAX = 4096

Sub = Optional[tuple[int, int]]
State = tuple[Sub, Sub]


def _sub_step(n: int, sub: Sub, digit: int) -> Sub:
    if sub is None:
        return None
    jmin, p = sub
    pos = p + 1
    m = pos.bit_length()
    if pos == 1 << (m - 1) and m >= jmin:
        # pos = 2^{m-1}: the current block may be B_m and end here
        if digit == 0:
            return (m, 0)
        return (m + 1, pos) if m < n else None
    if digit != thue_morse_digit(pos):
        return None
    return (jmin, pos)


@dataclass(frozen=True)
class FamilyAutomaton:
    """Deterministic recognizer of prefixes of level-``level`` family members.

    A state pairs the plain and the reflected reading, either of which may
    have died (``None``).
    """

    level: int
    _cache: dict = field(default_factory=dict, compare=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, compare=False, repr=False)

    @property
    def initial(self) -> State:
        return ((1, 0), (1, 0))

    def step(self, state: State, digit: int) -> State | None:
        plain, refl = state
        nxt = (_sub_step(self.level, plain, digit), _sub_step(self.level, refl, 1 - digit))
        return None if nxt == (None, None) else nxt

    def run(self, digits: Iterable[int], state: State | None = None) -> State | None:
        s = self.initial if state is None else state
        for d in digits:
            s = self.step(s, d)
            if s is None:
                return None
        return s

    def accepts_prefix(self, digits: Iterable[int]) -> bool:
        return self.run(digits) is not None

    def states(self) -> frozenset:
        """All reachable states."""
        seen = {self.initial}
        todo = [self.initial]
        while todo:
            s = todo.pop()
            for d in (0, 1):
                t = self.step(s, d)
                if t is not None and t not in seen:
                    seen.add(t)
                    todo.append(t)
        return frozenset(seen)

    def _extreme(self, state: State, prefer: int) -> EventuallyPeriodicSeq:
        key = (state, prefer)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        seen: dict[State, int] = {}
        digits: list[int] = []
        s = state
        while s not in seen:
            seen[s] = len(digits)
            t = self.step(s, prefer)
            d = prefer
            if t is None:
                d = 1 - prefer
                t = self.step(s, d)
            digits.append(d)
            s = t
        start = seen[s]
        seq = EventuallyPeriodicSeq(tuple(digits[:start]), tuple(digits[start:]))
        with self._lock:
            self._cache[key] = seq
        return seq

    def lexmin(self, state: State) -> EventuallyPeriodicSeq:
        return self._extreme(state, 0)

    def lexmax(self, state: State) -> EventuallyPeriodicSeq:
        return self._extreme(state, 1)


@lru_cache(maxsize=None)
def build_automaton(n: int) -> FamilyAutomaton:
    if not 1 <= n <= MAX_LEVEL:
        raise DomainError(f"level {n} outside 1..{MAX_LEVEL}")
    return FamilyAutomaton(n)


def is_member(a: FamilyAutomaton, s: EventuallyPeriodicSeq) -> bool:
    """Whether ``s`` is a full member of the family (all runs are infinite-accepting)."""
    state = a.run(s.preamble)
    if state is None:
        return False
    seen = set()
    while state not in seen:
        seen.add(state)
        state = a.run(s.cycle, state)
        if state is None:
            return False
    return True


def extremal_continuations(a: FamilyAutomaton, state: State | None = None):
    """Lex-smallest and lex-largest infinite continuations from ``state``."""
    state = a.initial if state is None else state
    return a.lexmin(state), a.lexmax(state)


# --------------------------------------------------------------------------
# lex-minimal witness search


@dataclass(frozen=True)
class GammaSearchResult:
    gamma: EventuallyPeriodicSeq
    level: int
    certified: bool = True
    depth: int = 0


@dataclass(frozen=True)
class NotFound:
    level: int
    reason: str
    depth: int = 0

    def __bool__(self) -> bool:
        return False


def _descend(a: FamilyAutomaton, x: PreciseReal, q: PreciseReal, d_max: int) -> GammaSearchResult | NotFound:
    inv = 1 / q
    values: dict[EventuallyPeriodicSeq, PreciseReal] = {}

    def value(seq: EventuallyPeriodicSeq) -> PreciseReal:
        v = values.get(seq)
        if v is None:
            v = values[seq] = eval_at(seq, q)
        return v

    state = a.initial
    if decide(value(a.lexmax(state)), x, "family supremum against x") is not Cmp.GREATER:
        return NotFound(a.level, "no family member exceeds x at the lower base")
    digits: list[int] = []
    head = PreciseReal.exact(0)
    scale = PreciseReal.exact(1)
    for depth in range(d_max + 1):
        low = a.lexmin(state)
        if decide(head + scale * value(low), x, f"lex-min continuation at depth {depth}") is Cmp.GREATER:
            return GammaSearchResult(low.prepend(digits), a.level, True, depth)
        s0 = a.step(state, 0)
        take = 1
        if s0 is not None:
            reach = head + scale * inv * value(a.lexmax(s0))
            if decide(reach, x, f"branch bound at depth {depth}") is Cmp.GREATER:
                take = 0
        scale = scale * inv
        if take:
            head = head + scale
            state = a.step(state, 1)
        else:
            state = s0
        digits.append(take)
    return NotFound(a.level, f"depth cap {d_max} reached", d_max)


def smallest_gamma(
    n: int,
    x: Union[Fraction, int, str, PreciseReal],
    ladder: BaseLadder | None = None,
    d_max: int = D_MAX,
) -> GammaSearchResult | NotFound:
    """Lex-smallest level-n member whose value at q_{n-1} exceeds ``x``.

    Digits are fixed greedily: 0 whenever some member below the current
    prefix followed by 0 still beats x (the lex-max continuation bounds all
    of them, values being monotone in lex order at q_{n-1}), otherwise 1.
    The subtree kept always holds a witness, so no backtracking is needed.
    The search stops as soon as the lex-min continuation itself is a witness.
    """
    a = build_automaton(n)
    if n == 1:
        # q_0 = 1: 1^inf has infinite value and 0^inf has value 0
        return GammaSearchResult(EventuallyPeriodicSeq((), (1,)), 1, True, 0)

    def attempt():
        lad = ladder if ladder is not None else ladder_at(working_precision())
        if n - 1 > lad.depth:
            raise DomainError(f"level {n - 1} base not available in the ladder (depth {lad.depth})")
        xv = x if isinstance(x, PreciseReal) else PreciseReal.exact(x)
        return _descend(a, xv, lad.q(n - 1), d_max)

    try:
        return adaptive(attempt, error=BoundaryError)
    except BoundaryError as exc:
        raise BoundaryError(f"level {n}: x sits on a family value at q_{n - 1} ({exc.context})", exc.bits) from exc
