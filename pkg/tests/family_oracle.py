"""Explicit enumeration of the unique-expansion families, independent of the automata."""

from itertools import product

from univoque.words import EventuallyPeriodicSeq, tau_word


def block(m: int) -> tuple:
    return tuple(tau_word(2 ** (m - 1)).minus())


def members(n: int, max_exp: int, max_pre: int | None = None) -> set:
    """Level-n family members with every exponent at most ``max_exp``."""
    out = set()
    for j in range(1, n + 1):
        for exps in product(range(max_exp + 1), repeat=j - 1):
            pre = ()
            for m, a in enumerate(exps, start=1):
                pre += block(m) * a
            if max_pre is not None and len(pre) > max_pre:
                continue
            s = EventuallyPeriodicSeq(pre, block(j))
            out.add(s)
            out.add(s.reflect())
    return out


def candidates(max_pre: int, max_cyc: int) -> set:
    out = set()
    for lp in range(max_pre + 1):
        for pre in product((0, 1), repeat=lp):
            for lc in range(1, max_cyc + 1):
                for cyc in product((0, 1), repeat=lc):
                    out.add(EventuallyPeriodicSeq(pre, cyc))
    return out
