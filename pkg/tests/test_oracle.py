import random
from fractions import Fraction

import pytest

from univoque.algebraic import golden_field
from univoque.bases import ladder_field
from univoque.errors import DomainError
from univoque.precise import PreciseReal, precision
from univoque.oracle import (
    Infeasible,
    Multiple,
    Undecided,
    Unique,
    branch_nodes,
    expansion_branches,
    greedy_expansion,
    verify_uniqueness_at,
)
from univoque.solver import Classification, qs
from univoque.words import BinaryWord, EventuallyPeriodicSeq


def reference_branches(x: Fraction, q: Fraction, depth: int):
    """Plain rational subtract-and-scale simulation, written without the window formulas."""
    top = 1 / (q - 1)
    if not 0 <= x <= top:
        return "Infeasible", None
    r = x
    for k in range(1, depth + 1):
        options = [d for d in (0, 1) if 0 <= q * r - d <= top]
        if len(options) == 2:
            return "Multiple", k
        r = q * r - options[0]
    return "Unique", depth


def word(text: str) -> BinaryWord:
    return BinaryWord(tuple(int(c) for c in text))


def test_golden_one_is_multiple():
    qg = golden_field().generator
    v = expansion_branches(1, qg, 5)
    assert v == Multiple(1)


def test_two_at_three_halves_unique():
    assert expansion_branches(2, Fraction(3, 2), 64) == Unique(64)
    with precision(256):
        assert expansion_branches(2, PreciseReal.exact(Fraction(3, 2)), 64) == Unique(64)


def test_three_at_three_halves_infeasible():
    assert expansion_branches(3, Fraction(3, 2), 10) == Infeasible()
    assert expansion_branches(-1, Fraction(3, 2), 10) == Infeasible()


def test_gap_point_multiple():
    assert isinstance(expansion_branches(Fraction(7, 10), Fraction(17, 10), 40), Multiple)
    assert isinstance(expansion_branches(Fraction(7, 10), Fraction(3, 2), 40), Multiple)


def test_preconditions():
    with pytest.raises(DomainError):
        expansion_branches(1, Fraction(5, 2), 5)
    with pytest.raises(DomainError):
        expansion_branches(1, Fraction(3, 2), 0)
    with pytest.raises(DomainError):
        expansion_branches(1, Fraction(3, 2), 10_001)


def test_greedy_examples():
    q2 = ladder_field(2).generator
    assert greedy_expansion(1, q2, 8) == word("11010000")
    assert greedy_expansion(1, golden_field().generator, 4) == word("1100")
    for q in (Fraction(3, 2), Fraction(17, 10), Fraction(19, 10)):
        assert greedy_expansion(1 / q, q, 3) == word("100")


def test_exact_rational_agreement():
    rng = random.Random(21)
    for _ in range(200):
        q = Fraction(rng.randint(101, 199), 100)
        x = Fraction(rng.randint(0, 4000), 1000)
        depth = rng.randint(1, 40)
        kind, k = reference_branches(x, q, depth)
        exact = expansion_branches(x, q, depth)
        with precision(256):
            interval = expansion_branches(x, PreciseReal.exact(q), depth)
        assert exact.kind == kind
        if kind != "Infeasible":
            assert exact.depth == k
        if isinstance(interval, Undecided):
            # only at an exact tie between a remainder and a window edge
            continue
        assert interval == exact


def test_greedy_dominance():
    rng = random.Random(22)
    for _ in range(40):
        q = Fraction(rng.randint(140, 199), 100)
        x = Fraction(rng.randint(0, 1000), 1000) / (q - 1)
        depth = rng.randint(1, 10)
        g = greedy_expansion(x, q, depth)
        found = [node.digits for node in branch_nodes(x, q, depth)]
        assert found and g in found
        assert all(g.digits >= d.digits for d in found)


def test_feasibility_window():
    rng = random.Random(23)
    for _ in range(300):
        q = Fraction(rng.randint(101, 199), 100)
        r = Fraction(rng.randint(0, 10**4), 10**4) / (q - 1)
        both = 1 / q <= r <= 1 / (q * (q - 1))
        assert isinstance(expansion_branches(r, q, 1), Multiple) == both
        assert (reference_branches(r, q, 1)[0] == "Multiple") == both


def test_verify_examples():
    rep = verify_uniqueness_at(2, Fraction(3, 2), 60, EventuallyPeriodicSeq((), (1,)), 1)
    assert rep.passed and rep.member_ok
    with precision(256):
        r = qs("1.2", tol=Fraction(1, 10**30))
        rep = verify_uniqueness_at(Fraction(6, 5), r.qs, 60, r.gamma, r.level)
    assert rep.passed
    assert isinstance(rep.branches, Unique)
    rep = verify_uniqueness_at(Fraction(7, 10), Fraction(3, 2), 60)
    assert rep.verdict == "Fail" and isinstance(rep.branches, Multiple)


def test_verify_rejects_wrong_gamma():
    rep = verify_uniqueness_at(2, Fraction(3, 2), 60, EventuallyPeriodicSeq((), (0, 1)), 1)
    assert rep.verdict == "Fail"
    rep = verify_uniqueness_at(2, Fraction(3, 2), 60, EventuallyPeriodicSeq((), (1,)), None)
    assert rep.passed and rep.member_ok is None


def test_solver_consistency():
    rng = random.Random(24)
    checked = 0
    while checked < 50:
        x = Fraction(rng.randint(5, 6000), 1000)
        with precision(256):
            r = qs(x, tol=Fraction(1, 10**30))
            if r.classification is not Classification.BELOW_KL:
                continue
            rep = verify_uniqueness_at(x, r.qs, 60, r.gamma, r.level)
        assert rep.passed, (x, rep)
        below = r.qs.enclosure.bounds()[0] - Fraction(1, 100)
        if below > 1:
            assert isinstance(expansion_branches(x, below, 60), (Multiple, Infeasible))
        checked += 1
