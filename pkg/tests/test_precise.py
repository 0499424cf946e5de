from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from univoque.errors import BracketError, DomainError, PrecisionError, Undecided
from univoque.precise import (
    Cmp,
    PreciseReal,
    adaptive,
    bisect_root,
    compare,
    decide,
    eval_at,
    parse_exact,
    precision,
    render_decimal,
    with_precision,
    word_value,
)
from univoque.words import BinaryWord, EventuallyPeriodicSeq, tau_word

S = EventuallyPeriodicSeq.parse
GOLDEN = Fraction(16180339887498948482, 10**19)


def exact_value(s: EventuallyPeriodicSeq, q: Fraction) -> Fraction:
    # independent rational oracle: finite sums plus the geometric factor
    pre = sum(Fraction(d) / q ** (i + 1) for i, d in enumerate(s.preamble))
    cyc = sum(Fraction(d) / q ** (i + 1) for i, d in enumerate(s.cycle))
    return pre + cyc / q ** len(s.preamble) / (1 - 1 / q ** len(s.cycle))


def golden_enclosure():
    return bisect_root(lambda q: q * q - q - 1, Fraction(14, 10), Fraction(18, 10), Fraction(1, 10**30)).enclosure


def test_parse_exact():
    assert parse_exact("1.25") == Fraction(5, 4)
    assert parse_exact("-3e-2") == Fraction(-3, 100)
    assert parse_exact(".5") == Fraction(1, 2)
    assert parse_exact("7/3") == Fraction(7, 3)
    for bad in ["", "1..2", "abc", "1/0", "1e"]:
        with pytest.raises(DomainError):
            parse_exact(bad)


def test_exact_enclosure_contains_value():
    x = PreciseReal.exact("0.1")
    lo, hi = x.bounds()
    assert lo <= Fraction(1, 10) <= hi
    assert lo < hi
    assert PreciseReal.exact(3).is_point()


def test_arithmetic_encloses():
    a, b = PreciseReal.exact(Fraction(1, 3)), PreciseReal.exact(Fraction(2, 7))
    for got, want in [
        (a + b, Fraction(1, 3) + Fraction(2, 7)),
        (a - b, Fraction(1, 3) - Fraction(2, 7)),
        (a * b, Fraction(2, 21)),
        (a / b, Fraction(7, 6)),
        (a**5, Fraction(1, 243)),
        (1 / b, Fraction(7, 2)),
        (-a, Fraction(-1, 3)),
    ]:
        lo, hi = got.bounds()
        assert lo <= want <= hi


def test_comparisons_three_valued():
    a = PreciseReal.exact(Fraction(1, 3))
    assert a.cmp(Fraction(1, 2)) is Cmp.LESS
    assert a.cmp(0) is Cmp.GREATER
    assert a.cmp(a) is Cmp.UNDECIDED
    with pytest.raises(Undecided):
        decide(a, a, "self")


def test_eval_at_examples():
    g = golden_enclosure()
    assert eval_at(S("(10)^inf"), g).contains(1) or eval_at(S("(10)^inf"), g).overlaps(1)
    assert eval_at(S("(0)^inf"), Fraction(3, 2)).contains(0)
    v = eval_at(S("(1)^inf"), Fraction(3, 2))
    assert v.contains(2)


def test_eval_at_rejects_bad_base():
    with pytest.raises(DomainError):
        eval_at(S("(1)^inf"), 2)
    with pytest.raises(DomainError):
        eval_at(S("(1)^inf"), 1)
    with pytest.raises(DomainError):
        eval_at(S("(1)^inf"), PreciseReal(PreciseReal.exact(Fraction(1, 2)).lo, PreciseReal.exact(Fraction(3, 2)).hi))


seqs = st.builds(
    EventuallyPeriodicSeq,
    st.lists(st.integers(0, 1), max_size=10).map(tuple),
    st.lists(st.integers(0, 1), min_size=1, max_size=8).map(tuple),
)
bases = st.fractions(min_value=Fraction(101, 100), max_value=Fraction(199, 100), max_denominator=1000)


@settings(max_examples=1000, deadline=None)
@given(seqs, bases)
def test_eval_at_sound_against_exact(s, q):
    v = eval_at(s, q)
    lo, hi = v.bounds()
    assert lo <= exact_value(s, q) <= hi


@settings(max_examples=200, deadline=None)
@given(seqs, bases, bases)
def test_eval_at_strictly_decreasing(s, p, q):
    if p == q or s == S("(0)^inf"):
        return
    p, q = min(p, q), max(p, q)
    assert eval_at(s, p).cmp(eval_at(s, q)) is not Cmp.LESS
    assert exact_value(s, p) > exact_value(s, q)


def test_word_value():
    v = word_value(BinaryWord.parse("11"), Fraction(2))
    assert v.contains(Fraction(3, 4))


def test_bisect_golden():
    r = bisect_root(lambda q: q * q - q - 1, Fraction(14, 10), Fraction(18, 10), 1e-12)
    lo, hi = r.enclosure.bounds()
    assert hi - lo <= Fraction(1e-12)
    # exact sign at the endpoints of the rational bracket
    assert lo * lo - lo - 1 < 0 < hi * hi - hi - 1
    assert abs(float(r) - 1.618033988749895) < 1e-12


def test_bisect_geometric():
    r = bisect_root(lambda q: 1 / (q - 1) - 2, Fraction(12, 10), Fraction(19, 10), 1e-12)
    assert r.enclosure.overlaps(Fraction(3, 2))
    assert r.width <= Fraction(1e-12)


def test_bisect_ladder_two():
    w = tau_word(4)
    r = bisect_root(lambda q: 1 - word_value(w, q), GOLDEN, Fraction(18, 10), 1e-12)
    lo, hi = r.enclosure.bounds()
    assert lo**4 - lo**3 - lo**2 - 1 < 0 < hi**4 - hi**3 - hi**2 - 1
    assert abs(float(r) - 1.75488) < 5e-6


def test_bisect_deterministic():
    f = lambda q: q * q - 2
    assert bisect_root(f, 1, 2, 1e-20) == bisect_root(f, 1, 2, 1e-20)


def test_bisect_bracket_error():
    with pytest.raises(BracketError):
        bisect_root(lambda q: q * q + 1, 0, 2)
    with pytest.raises(BracketError):
        bisect_root(lambda q: q - 1, 1, 2)


def test_bisect_precision_error():
    with pytest.raises(PrecisionError):
        bisect_root(lambda q: q * q - 2, 1, 2, Fraction(1, 2**5000))


@settings(max_examples=50, deadline=None)
@given(st.fractions(min_value=Fraction(11, 10), max_value=Fraction(39, 10), max_denominator=10**6))
def test_bisect_contains_rational_roots(r):
    # f(q) = q - r changes sign exactly at r
    got = bisect_root(lambda q: q - r, 1, 4, 1e-15)
    lo, hi = got.enclosure.bounds()
    assert lo <= r <= hi


def test_with_precision_and_equality_never_separates():
    with precision(64):
        g = bisect_root(lambda q: q * q - q - 1, 1, 2, Fraction(1, 2**40)).enclosure
        assert compare(eval_at(S("(10)^inf"), g), 1) is Cmp.UNDECIDED
    with precision(256):
        g = bisect_root(lambda q: q * q - q - 1, 1, 2, Fraction(1, 2**200)).enclosure
        assert compare(eval_at(S("(10)^inf"), g), 1) is Cmp.UNDECIDED


def test_kl_value_beats_printed_decimal():
    from univoque.bases import compute_qKL

    assert compare(eval_at(S("0(10)^inf"), compute_qKL().enclosure), Fraction("0.455")) is Cmp.GREATER


def test_tiny_separation_decided_at_256_bits():
    x = Fraction("0.123456789")
    y = x + Fraction(1, 10**30)
    assert with_precision(256, lambda: compare(PreciseReal.exact(x), PreciseReal.exact(y))) is Cmp.LESS


def test_adaptive_doubles_until_decided():
    x, y = Fraction(1, 3), Fraction(1, 3) + Fraction(1, 2**150)
    seen = []

    def run():
        from univoque.precise import working_precision

        seen.append(working_precision())
        return decide(PreciseReal.exact(x), PreciseReal.exact(y))

    assert adaptive(run, start=64) is Cmp.LESS
    assert seen == [64, 128, 256]
    with pytest.raises(PrecisionError):
        adaptive(lambda: decide(PreciseReal.exact(x), PreciseReal.exact(x)), start=64, cap_bits=256)


def test_precision_bounds():
    with pytest.raises(DomainError):
        with precision(8):
            pass


def test_refinement_nested():
    s = S("1101(0011)^inf")
    q = Fraction(17, 10)
    with precision(128):
        coarse = eval_at(s, q)
    with precision(256):
        fine = eval_at(s, q)
    assert coarse.contains(fine)


def test_render_decimal_certified_places():
    r = bisect_root(lambda q: 1 / (q - 1) - 2, Fraction(12, 10), Fraction(19, 10), 1e-12)
    txt = render_decimal(r.enclosure)
    assert txt.startswith("1.5000000000")
    assert render_decimal(PreciseReal.exact(Fraction(1, 4)), 3) == "0.250"
    assert render_decimal(PreciseReal.exact(Fraction(1, 8)), 2) == "0.12"
