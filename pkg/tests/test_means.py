import math
from fractions import Fraction as F

import pytest

from setmeans.extreal import ExtReal, NEG_INF, POS_INF
from setmeans.means import (
    anchor_mean,
    avg_eval,
    get_mean,
    harmonic_hit_mean,
    mean_set_hf,
    mlis_eval,
    midpoint_eval,
    mmu_eval,
    ordinal_gap_mean,
    reciprocal_extension,
    simple_extension,
)
from setmeans.measures import HARMONIC, LEBESGUE
from setmeans.seqform import SeqForm, seq_const, seq_n
from setmeans.sets import (
    FractalPart,
    FractalRow,
    affine,
    family_set,
    fractal_set,
    interval_set,
    iv,
    normalize,
    point_set,
    union,
)

CANTOR = [(F(1, 3), F(0)), (F(1, 3), F(2, 3))]


def tail_set(n_start=1):
    return family_set(seq_n(), SeqForm.term(1, F(1, 2), 0), n_start)


# -- measure means -----------------------------------------------------------


def test_mmu_examples():
    assert mmu_eval(HARMONIC, interval_set(1, POS_INF)).value == 2
    for a in (F(1), F(2), F(5, 2)):
        assert mmu_eval(HARMONIC, interval_set(a, POS_INF)).value == 2 * a
    assert mmu_eval(LEBESGUE, interval_set(3, 9)).value == 6
    assert mmu_eval(LEBESGUE, interval_set(0, POS_INF)).kind == "undefined"
    assert mmu_eval(LEBESGUE, point_set(1, 2)).kind == "undefined"


def test_mmu_disjoint_union_identity():
    # the two-part decomposition K(AuB) = (mA KA + mB KB)/(mA + mB)
    from setmeans.measures import measure_of

    a = union(interval_set(0, 1), point_set(-3))
    b = interval_set(5, 8)
    for mu in (LEBESGUE, HARMONIC):
        if mu is HARMONIC:
            a = interval_set(F(1, 2), 1)
        ka = mmu_eval(mu, a)
        kb = mmu_eval(mu, b)
        ku = mmu_eval(mu, union(a, b))
        ma = measure_of(mu, a).finite
        mb = measure_of(mu, b).finite
        combined = (ma * ka.value + mb * kb.value) / (ma + mb)
        assert abs(float(ku.value) - float(combined)) <= 1e-9


def test_mmu_shift_relation():
    h = union(interval_set(0, 1), interval_set(4, 6))
    for t in (F(5), F(-3), F(7, 3)):
        assert mmu_eval(LEBESGUE, affine(h, 1, t)).value == mmu_eval(LEBESGUE, h).value + t


def test_avg_examples():
    cset = fractal_set(CANTOR)
    assert avg_eval(cset).value == F(1, 2)
    pair = union(cset, affine(cset, 1, 2))
    assert avg_eval(pair).value == F(3, 2)
    mixed = union(interval_set(0, 1), affine(cset, 1, 2))
    assert avg_eval(mixed).value == F(1, 2)
    s = FractalPart(CANTOR).s
    assert avg_eval(mixed, s).kind == "undefined"  # mixed dimensions at fixed s
    base3 = FractalPart([(F(1, 8), F(0)), (F(1, 8), F(7, 8))])
    row = normalize([FractalRow(base3, seq_n(), SeqForm.term(F(1, 4), 1, -2), 1)])
    assert avg_eval(row).kind == "+inf"


# -- order based means ---------------------------------------------------------


def test_mlis_examples():
    assert mlis_eval(interval_set(0, 1)).value == F(1, 2)
    recs = family_set(SeqForm.term(1, 1, -1), seq_const(0), 1)
    h = union(recs, interval_set(2, 3))
    # oracle via bounds: accumulation points are {0} and [2,3]
    b = h.bounds()
    assert (b.liminf, b.limsup) == (ExtReal(0), ExtReal(3))
    assert mlis_eval(h).value == F(3, 2)
    assert mlis_eval(point_set(1, 2, 5)).kind == "undefined"
    assert mlis_eval(interval_set(0, POS_INF)).kind == "undefined"


def test_midpoint():
    assert midpoint_eval(interval_set(0, 1)).value == F(1, 2)
    assert midpoint_eval(point_set(1, 2, 7)).value == 4
    assert midpoint_eval(interval_set(0, POS_INF)).kind == "undefined"


def hand_gap_iteration(h, start, steps=50):
    """Oracle: literal successor iteration on interval complements."""
    from setmeans.sets import next_gap_inf

    cur = start
    for _ in range(steps):
        nxt = next_gap_inf(h, cur)
        if nxt is None or nxt == ExtReal(cur):
            return cur
        cur = nxt.finite
    return cur


def test_ordinal_gap_mean_examples():
    cases = [
        (interval_set(0, 1), F(0)),
        (union(interval_set(0, 1), interval_set(2, 3)), F(0)),
        (point_set(0), F(0)),
        (union(interval_set(0, F(1, 2)), point_set(2)), F(0)),
    ]
    for h, start in cases:
        want = hand_gap_iteration(h, start)
        got = ordinal_gap_mean(h)
        assert got.is_finite and got.value == want, h
    assert ordinal_gap_mean(interval_set(0, 1)).value == 1
    assert ordinal_gap_mean(union(interval_set(0, 1), interval_set(2, 3))).value == 1
    assert ordinal_gap_mean(point_set(0)).value == 0
    assert ordinal_gap_mean(interval_set(-1, 1)).kind == "undefined"


def test_harmonic_hit_examples():
    assert harmonic_hit_mean(interval_set(1, POS_INF)).kind == "+inf"
    pows = family_set(SeqForm.term(1, 2, 0), seq_const(0), 0)
    v = harmonic_hit_mean(pows)
    assert v.value == 3  # 1 + sum 1/2^n over n >= 0 hits = 1 + 2
    sqs = family_set(seq_n() * seq_n(), seq_const(0), 1)
    v2 = harmonic_hit_mean(sqs)
    # oracle: partial sums of 1/n^2 with an integral remainder bound
    partial = sum(1.0 / n**2 for n in range(1, 20000))
    assert partial < float(v2.value) - 1 < partial + 1.0 / 19999
    assert abs(float(v2.value) - (1 + math.pi**2 / 6)) < 1e-9
    assert harmonic_hit_mean(family_set(seq_n(), seq_const(0), 1)).kind == "+inf"
    assert harmonic_hit_mean(interval_set(1, 2)).kind == "undefined"  # bounded
    assert harmonic_hit_mean(interval_set(F(1, 2), POS_INF)).kind == "undefined"


def test_anchor_examples():
    anchors = seq_n()
    assert anchor_mean(point_set(F(1, 2), 3), anchors).value == 3
    assert anchor_mean(point_set(F(1, 2)), anchors).value == F(1, 2)
    assert anchor_mean(interval_set(0, POS_INF), anchors).kind == "+inf"
    assert anchor_mean(interval_set(NEG_INF, 0), anchors).kind == "undefined"


# -- combinators ---------------------------------------------------------------


def test_simple_extension():
    se = simple_extension(get_mean("midpoint"))
    assert se(interval_set(0, POS_INF)).kind == "+inf"
    assert se(interval_set(0, 1)).value == F(1, 2)
    assert se(family_set(seq_n(), seq_const(0), 1)).kind == "+inf"
    # agrees with the base mean on every bounded catalog set
    from setmeans.catalog import bounded_catalog

    base = get_mean("midpoint")
    for name, h in bounded_catalog().items():
        assert se(h) == base(h), name


def test_reciprocal_extension():
    mlis = get_mean("mlis")
    pows = family_set(SeqForm.term(1, 2, 0), seq_const(0), 0)
    assert reciprocal_extension(mlis, pows).kind == "+inf"
    mid = get_mean("midpoint")
    assert reciprocal_extension(mid, interval_set(1, POS_INF)).value == 2
    assert reciprocal_extension(mid, interval_set(2, POS_INF)).value == 4
    assert reciprocal_extension(mid, interval_set(-1, POS_INF)).kind == "undefined"
    # bounded sets fall through to the base mean
    assert reciprocal_extension(mid, interval_set(1, 3)).value == 2


# -- median interval -----------------------------------------------------------


def cdf_oracle_median(h, lo=-50.0, hi=50.0, n=400_000):
    """Brute piecewise mass balance on a fine grid (float)."""
    xs = [lo + (hi - lo) * i / n for i in range(n + 1)]
    total = 0.0
    masses = [0.0]
    for a, b in zip(xs, xs[1:]):
        mid = F((a + b) / 2).limit_denominator(10**6)
        inside = h.contains(mid)
        total += (b - a) if inside else 0.0
        masses.append(total)
    half = total / 2
    lo_idx = min(range(len(masses)), key=lambda i: abs(masses[i] - half))
    return xs[lo_idx]


def test_mean_set_hf_examples():
    assert mean_set_hf(interval_set(0, 2)) == iv(1, 1)
    assert mean_set_hf(union(interval_set(0, 1), interval_set(2, 3))) == iv(1, 2)
    assert mean_set_hf(union(interval_set(0, 1), interval_set(10, 13))) == iv(11, 11)
    got = mean_set_hf(union(interval_set(0, 2), interval_set(5, 7)))
    approx = cdf_oracle_median(union(interval_set(0, 2), interval_set(5, 7)))
    assert got == iv(2, 5)
    assert got.lo.finite - F(1, 2) <= F(approx).limit_denominator(100) <= got.hi.finite + F(1, 2)


def test_mean_set_hf_exact_balance():
    from setmeans.measures import measure_of

    for h in (
        union(interval_set(0, 1), interval_set(10, 13)),
        union(interval_set(-4, -1), interval_set(0, 1)),
        tail_set(),
    ):
        itv = mean_set_hf(h)
        from setmeans.sets import clip

        left = measure_of(LEBESGUE, clip(h, NEG_INF, itv.lo.finite)).finite
        right = measure_of(LEBESGUE, clip(h, itv.hi.finite, POS_INF)).finite
        assert left == right  # exact rational balance


def test_internality_across_catalog():
    from setmeans.catalog import build_catalog, catalog_means

    for mname, mean in catalog_means.__call__().items():
        if mname.startswith("simple:"):
            continue  # PlusInf on below-unbounded sets violates internality
        for sname, h in build_catalog().items():
            v = mean(h)
            if not v.is_defined:
                continue
            b = h.bounds()
            val = v.as_extreal()
            if val.is_finite and b.inf.is_finite:
                assert float(b.inf.finite) - 1e-9 <= float(val.finite), (mname, sname)
            if val.is_finite and b.sup.is_finite:
                assert float(val.finite) <= float(b.sup.finite) + 1e-9, (mname, sname)
            if not val.is_finite:
                assert (val.is_pos_inf and b.sup.is_pos_inf) or (
                    val.is_neg_inf and b.inf.is_neg_inf
                ), (mname, sname)
