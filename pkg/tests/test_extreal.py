from fractions import Fraction

import pytest

from setmeans.extreal import ExtReal, NEG_INF, POS_INF, ext_max, ext_min


def test_total_ordering():
    vals = [NEG_INF, ExtReal(-5), ExtReal(0), ExtReal(Fraction(1, 3)), POS_INF]
    for a, b in zip(vals, vals[1:]):
        assert a < b
        assert b > a
        assert a <= b and a != b
    assert POS_INF == POS_INF
    assert not POS_INF < POS_INF


def test_addition_rules():
    assert POS_INF + POS_INF == POS_INF
    assert NEG_INF + NEG_INF == NEG_INF
    assert ExtReal(3) + POS_INF == POS_INF
    assert ExtReal(3) + NEG_INF == NEG_INF
    assert (ExtReal(Fraction(1, 2)) + ExtReal(Fraction(1, 3))).finite == Fraction(5, 6)
    with pytest.raises(ArithmeticError):
        POS_INF + NEG_INF


def test_multiplication_and_division():
    assert POS_INF * ExtReal(-2) == NEG_INF
    assert NEG_INF * NEG_INF == POS_INF
    with pytest.raises(ArithmeticError):
        POS_INF * ExtReal(0)
    assert (POS_INF / ExtReal(2)) == POS_INF
    assert (ExtReal(5) / POS_INF).finite == 0
    assert (ExtReal(3) / ExtReal(2)).finite == Fraction(3, 2)


def test_negation_min_max():
    assert -POS_INF == NEG_INF
    assert (-ExtReal(Fraction(2, 7))).finite == Fraction(-2, 7)
    assert ext_min(ExtReal(1), NEG_INF, ExtReal(-3)) == NEG_INF
    assert ext_max(ExtReal(1), ExtReal(7)).finite == 7


def test_floats_and_nan_rejected():
    with pytest.raises(ValueError):
        ExtReal(float("nan"))
    with pytest.raises(ValueError):
        ExtReal(float("inf"))
    assert ExtReal.of(float("inf")) == POS_INF
    assert ExtReal.of(float("-inf")) == NEG_INF
