from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from setmeans.extreal import ExtReal, NEG_INF, POS_INF
from setmeans.seqform import SeqForm, seq_const, seq_n
from setmeans.sets import (
    BlockFamily,
    FractalPart,
    MalformedFamilyError,
    NormalizeError,
    SetDomainError,
    UnsupportedClipError,
    affine,
    clip,
    empty_set,
    family_set,
    fractal_set,
    interval_set,
    iv,
    next_gap_inf,
    normalize,
    point_set,
    reciprocal,
    union,
)

CANTOR = [(F(1, 3), F(0)), (F(1, 3), F(2, 3))]


def tail_set(n_start=1):
    return family_set(seq_n(), SeqForm.term(1, F(1, 2), 0), n_start)


# -- normalize ---------------------------------------------------------------


def test_adjacent_closed_intervals_merge():
    assert normalize([iv(0, 1), iv(1, 2)]) == interval_set(0, 2)


def test_covered_point_absorbed():
    assert normalize([iv(0, 1), F(1, 2)]) == interval_set(0, 1)


def test_components_sorted():
    s = normalize([iv(2, 3), iv(0, 1)])
    assert [itv.lo.finite for itv in s.intervals] == [0, 2]


def test_point_fills_open_gap():
    s = union(interval_set(0, 1, True, False), interval_set(1, 2, False, True), point_set(1))
    assert s == interval_set(0, 2)


def test_normalize_is_projection():
    raw = [iv(0, 1), iv(F(1, 2), 2), F(3, 2), F(5)]
    once = normalize(raw)
    assert normalize([once]) == once


def test_malformed_family_rejected():
    with pytest.raises(MalformedFamilyError):
        BlockFamily(seq_n(), seq_const(2), 1)  # blocks [n, n+2] overlap
    with pytest.raises(MalformedFamilyError):
        BlockFamily(seq_n(), seq_const(-1), 1)
    with pytest.raises(MalformedFamilyError):
        BlockFamily(seq_const(3), seq_const(0), 1)  # constant positions


def test_family_family_overlap_detected():
    a = BlockFamily(seq_n(), seq_const(F(1, 2)), 1)
    b = BlockFamily(seq_n() + seq_const(F(1, 4)), seq_const(F(1, 2)), 1)
    with pytest.raises(NormalizeError):
        normalize([a, b])


def test_interleaved_families_coexist():
    evens = BlockFamily(seq_n() * 2, seq_const(F(1, 2)), 1)
    odds = BlockFamily(seq_n() * 2 + seq_const(1), seq_const(F(1, 2)), 1)
    s = normalize([evens, odds])
    assert len(s.families) == 2


def test_union_identities():
    h = union(interval_set(0, 1), interval_set(F(1, 2), 2))
    assert h == interval_set(0, 2)
    assert union(h, empty_set()) == h
    assert union(h, h) == h


# -- clip --------------------------------------------------------------------


def test_clip_basic():
    h = union(interval_set(0, 1), interval_set(2, 3))
    assert clip(h, NEG_INF, F(3, 2)) == interval_set(0, 1)
    assert clip(h, F(1, 2), F(1, 2)) == point_set(F(1, 2))
    assert clip(h, 10, 20).is_empty
    assert clip(h, NEG_INF, POS_INF) == h


def test_clip_swaps_reversed_corners():
    h = interval_set(0, 10)
    assert clip(h, 7, 3) == interval_set(3, 7)


def test_clip_family_tail_keeps_rule():
    t = tail_set()
    c = clip(t, 5, POS_INF)
    assert len(c.families) == 1 and c.families[0].n_start == 5
    assert c.contains(5) and not c.contains(F(9, 2))


def test_clip_family_cut_inside_block():
    t = tail_set()
    c = clip(t, F(3, 2), POS_INF)
    assert c.contains(F(3, 2)) and not c.contains(F(5, 4))
    assert c.contains(2)


def test_clip_idempotent_on_catalog():
    from setmeans.catalog import build_catalog, random_clip_windows

    skipped = 0
    for name, h in build_catalog().items():
        for x, y in random_clip_windows(4, seed=hash(name) % (2**31)):
            try:
                once = clip(h, x, y)
            except UnsupportedClipError:
                skipped += 1
                continue
            assert clip(once, x, y) == once, (name, x, y)
    assert skipped <= 10


def test_split_union_identity():
    from setmeans.catalog import build_catalog

    cuts = [F(-3), F(0), F(1, 2), F(7), F(50)]
    for name, h in build_catalog().items():
        if h.rows:
            continue  # finite upper clips are unsupported on rows
        for x in cuts:
            try:
                left = clip(h, NEG_INF, x)
                right = clip(h, x, POS_INF)
            except UnsupportedClipError:
                continue
            assert union(left, right) == h, (name, x)


def test_bounds_respect_clip():
    from setmeans.catalog import build_catalog

    for name, h in build_catalog().items():
        if h.rows:
            continue
        piece = clip(h, F(1, 3), POS_INF)
        if piece.is_empty:
            continue
        assert piece.bounds().inf >= ExtReal(F(1, 3)), name


# -- affine / reciprocal -------------------------------------------------------


def test_affine_examples():
    assert affine(interval_set(0, 1), 1, 5) == interval_set(5, 6)
    assert affine(interval_set(1, 2), -1, 0) == interval_set(-2, -1)
    assert affine(interval_set(0, 1), 0, 7) == point_set(7)


def test_affine_involution_on_catalog():
    from setmeans.catalog import build_catalog

    for name, h in build_catalog().items():
        if h.rows:
            continue  # rows support only positive rescaling
        out = affine(affine(h, 3, -2), F(1, 3), F(2, 3))
        assert out == h, name


def test_reciprocal_examples():
    assert reciprocal(interval_set(1, 2)) == interval_set(F(1, 2), 1)
    assert reciprocal(interval_set(1, POS_INF)) == interval_set(0, 1, False, True)
    pows = family_set(SeqForm.term(1, 2, 0), seq_const(0), 0)
    r = reciprocal(pows)
    assert r.contains(F(1, 8)) and not r.contains(F(3, 4))
    assert reciprocal(r) == pows
    with pytest.raises(SetDomainError):
        reciprocal(interval_set(-1, 2))
    with pytest.raises(SetDomainError):
        reciprocal(point_set(0, 1))


def test_reciprocal_involution_more():
    h = union(interval_set(1, 2), point_set(5), family_set(seq_n(), seq_const(0), 3))
    assert reciprocal(reciprocal(h)) == h


# -- bounds ------------------------------------------------------------------


def test_bounds_examples():
    b = union(interval_set(0, 1), point_set(5)).bounds()
    assert (b.inf, b.sup, b.liminf, b.limsup) == (
        ExtReal(0),
        ExtReal(5),
        ExtReal(0),
        ExtReal(1),
    )
    b2 = interval_set(3, POS_INF).bounds()
    assert b2.inf == 3 and b2.sup.is_pos_inf and b2.limsup.is_pos_inf
    nats = family_set(seq_n(), seq_const(0), 1)
    recs = family_set(SeqForm.term(1, 1, -1), seq_const(0), 1)
    b3 = union(nats, recs).bounds()
    assert b3.inf == 0 and b3.sup.is_pos_inf
    assert b3.liminf == 0 and b3.limsup.is_pos_inf
    assert point_set(1, 2, 5).bounds().liminf is None


# -- fractals ------------------------------------------------------------------


def test_fractal_membership_and_clip():
    c = FractalPart(CANTOR)
    assert c.contains(F(0)) and c.contains(F(1)) and c.contains(F(1, 3))
    assert not c.contains(F(1, 2))
    cs = fractal_set(CANTOR)
    left = clip(cs, NEG_INF, F(1, 2))
    assert len(left.fractals) == 1
    lo, hi = left.fractals[0].hull()
    assert (lo.finite, hi.finite) == (0, F(1, 3))
    gap_piece = clip(cs, NEG_INF, F(1, 5))  # 1/5 lies in the gap (1/9, 2/9)
    assert gap_piece.fractals and gap_piece.fractals[0].hull()[1] == F(1, 9)
    with pytest.raises(UnsupportedClipError):
        clip(cs, NEG_INF, F(1, 4))  # 1/4 = 0.0202... sits inside the attractor


def test_fractal_absorbed_by_interval():
    s = union(interval_set(0, 1), fractal_set(CANTOR))
    assert s == interval_set(0, 1)


def test_next_gap_inf():
    assert next_gap_inf(interval_set(0, 1), F(0)) == 1
    assert next_gap_inf(union(interval_set(0, 1), interval_set(2, 3)), F(1, 2)) == 1
    assert next_gap_inf(interval_set(0, POS_INF), F(0)) is None
    assert next_gap_inf(point_set(0), F(0)) == 0
    assert next_gap_inf(point_set(3), F(1)) == 1


# -- hypothesis: interval algebra ------------------------------------------------

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=24)


@st.composite
def bounded_sets(draw):
    parts = []
    for _ in range(draw(st.integers(1, 3))):
        a = draw(rationals)
        w = draw(st.fractions(min_value=F(1, 24), max_value=4, max_denominator=24))
        parts.append(iv(a, a + w))
    for _ in range(draw(st.integers(0, 2))):
        parts.append(draw(rationals))
    return normalize(parts)


@given(bounded_sets(), rationals, rationals)
@settings(max_examples=80, deadline=None)
def test_clip_idempotence_random(h, x, y):
    if y < x:
        x, y = y, x
    once = clip(h, x, y)
    assert clip(once, x, y) == once


@given(bounded_sets(), rationals)
@settings(max_examples=80, deadline=None)
def test_split_union_random(h, x):
    left = clip(h, NEG_INF, x)
    right = clip(h, x, POS_INF)
    assert union(left, right) == h


@given(bounded_sets(), rationals)
@settings(max_examples=60, deadline=None)
def test_membership_after_clip(h, x):
    piece = clip(h, x, x + 1)
    for probe in (x, x + F(1, 2), x + 1):
        assert piece.contains(probe) == (h.contains(probe) and x <= probe <= x + 1)
