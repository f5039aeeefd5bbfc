import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from setmeans.seqform import SeqForm, faulhaber, geom_poly_prefix, seq_const, seq_n


def brute_range(form: SeqForm, m: int, m_hi: int) -> F:
    return sum((form.evaluate(n) for n in range(m, m_hi + 1)), F(0))


def test_faulhaber_matches_loops():
    for k in range(0, 6):
        for m_hi in (0, 1, 7, 31):
            assert faulhaber(k, m_hi) == sum(F(n) ** k for n in range(1, m_hi + 1))


def test_geom_poly_prefix_matches_loops():
    for rho in (F(1, 2), F(1, 3), F(2), F(5, 4)):
        for k in range(0, 4):
            for m_hi in (0, 3, 11):
                want = sum(
                    (F(n) ** k if n else (F(1) if k == 0 else F(0))) * rho**n
                    for n in range(m_hi + 1)
                )
                assert geom_poly_prefix(rho, k, m_hi) == want


def test_exact_tails():
    assert SeqForm.term(1, F(1, 2), 0).tail_sum(1).value == 1
    assert SeqForm.term(1, F(1, 2), 1).tail_sum(1).value == 2
    # sum n^2/2^n = 6
    s = (seq_n() * seq_n() * SeqForm.term(1, F(1, 2), 0)).tail_sum(1)
    assert s.exact and s.value == 6
    # clipped geometric tail from m: sum_{i>=m} i/2^i = (m+1)/2^(m-1)
    for m in (1, 2, 5, 10):
        s = SeqForm.term(1, F(1, 2), 1).tail_sum(m)
        assert s.value == F(m + 1, 2 ** (m - 1))


def test_numeric_tails_with_bounds():
    z = SeqForm.term(1, 1, -2).tail_sum(1)
    assert abs(z.value - math.pi**2 / 6) <= z.err + 1e-12
    assert z.err < 1e-9
    w = SeqForm.term(1, F(1, 2), -2).tail_sum(1)
    brute = sum(0.5**n / n**2 for n in range(1, 200))
    assert abs(w.value - brute) <= w.err + 1e-12


def test_divergence_classification():
    assert SeqForm.term(1, 1, -1).tail_sum(1).infinite == 1
    assert SeqForm.term(-2, 1, 0).tail_sum(1).infinite == -1
    assert SeqForm.term(1, 2, 0).tail_sum(1).infinite == 1
    # a growing geometric beats any polynomial of opposite sign
    mixed = SeqForm.term(-100, 1, 3) + SeqForm.term(1, F(3, 2), 0)
    assert mixed.tail_sum(1).infinite == 1
    # and the polynomial wins when the geometric shrinks
    mixed2 = SeqForm.term(-1, 1, 1) + SeqForm.term(100, F(1, 2), 0)
    assert mixed2.tail_sum(1).infinite == -1


def test_range_sums_match_loops():
    q = SeqForm.term(1, F(1, 2), 0) + SeqForm.term(3, 1, 1) + SeqForm.term(1, 1, -2)
    for m, m_hi in ((1, 40), (2, 700), (5, 1300)):
        got = q.range_sum(m, m_hi)
        want = brute_range(q, m, m_hi)
        assert abs(float(got.value) - float(want)) <= got.err + 1e-9


def test_huge_ranges_stay_certified():
    tiny = SeqForm.term(1, F(1, 2), 0)
    got = tiny.range_sum(1, 2**40)
    assert abs(float(got.value) - 1.0) <= got.err + 1e-12
    count = SeqForm.term(1, 1, 0).range_sum(7, 2**40)
    assert count.exact and count.value == 2**40 - 6


def test_limits():
    assert SeqForm.term(1, 1, 1).limit().is_pos_inf
    assert SeqForm.term(-1, 2, 0).limit().is_neg_inf
    assert (seq_const(7) + SeqForm.term(1, F(1, 2), 0)).limit() == 7
    assert SeqForm.term(1, 1, -1).limit() == 0


def test_lossy_evaluation_is_bounded():
    f = seq_n() + SeqForm.term(1, F(1, 2), 0)
    v, err = f.evaluate_lossy(2**40)
    assert v == 2**40  # the 2^-n part is dropped with a recorded bound
    assert 0 < err < 1e-200
    v2, err2 = f.evaluate_lossy(10)
    assert err2 == 0.0 and v2 == 10 + F(1, 1024)


@given(
    st.integers(min_value=-5, max_value=5),
    st.integers(min_value=-3, max_value=3),
    st.integers(min_value=1, max_value=30),
)
@settings(max_examples=60, deadline=None)
def test_algebra_matches_pointwise(a, b, n):
    f = seq_const(a) + seq_n() * b
    g = SeqForm.term(1, F(1, 2), 0) + seq_const(b)
    assert (f + g).evaluate(n) == f.evaluate(n) + g.evaluate(n)
    assert (f * g).evaluate(n) == f.evaluate(n) * g.evaluate(n)
    assert (-f).evaluate(n) == -f.evaluate(n)
    assert f.affine(3, -2).evaluate(n) == 3 * f.evaluate(n) - 2


def test_reciprocal_term():
    f = SeqForm.term(2, F(1, 2), 3)
    inv = f.reciprocal_term()
    for n in (1, 2, 9):
        assert inv.evaluate(n) == 1 / f.evaluate(n)
    assert (seq_n() + seq_const(1)).reciprocal_term() is None
