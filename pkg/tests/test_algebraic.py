from fractions import Fraction

import pytest

from univoque.algebraic import AlgebraicField, golden_field
from univoque.errors import DomainError


def test_golden_identities():
    q = golden_field().generator
    assert q * q == q + 1
    assert q * q - q - 1 == 0
    assert 1 / float(q) + 1 / float(q) ** 2 == pytest.approx(1)
    assert q > Fraction(8, 5) and q < Fraction(13, 8)


def test_reduction_is_modular():
    F = golden_field()
    q = F.generator
    assert (q * q * q).coeffs == (1, 2)  # q^3 = 2q + 1


def test_exact_tie_in_reducible_polynomial():
    # t^4 - t^3 - t^2 - 1 = (t + 1)(t^3 - 2t^2 + t - 1); theta is the root of the cubic
    F = AlgebraicField((-1, 0, -1, -1, 1), 1, 2, "q_2")
    t = F.generator
    assert t**3 - 2 * t * t + t - 1 == 0
    assert (t + 1).sign() == 1
    assert (t - Fraction(175, 100)).sign() == 1
    assert (t - Fraction(176, 100)).sign() == -1


def test_field_validation():
    with pytest.raises(DomainError):
        AlgebraicField((1, 0, 1), 0, 2)
    with pytest.raises(DomainError):
        AlgebraicField((-1, 0, 2), 0, 2)


def test_mixed_fields_rejected():
    a = golden_field().generator
    b = golden_field().generator
    with pytest.raises(DomainError):
        a + b
