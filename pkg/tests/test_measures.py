import math
import random
from fractions import Fraction as F

import pytest

from setmeans.extreal import ExtReal, NEG_INF, POS_INF
from setmeans.measures import (
    HARMONIC,
    LEBESGUE,
    MeasureDomainError,
    ifs_invariant_stats,
    measure_of,
    moment_of,
    s_measure_of,
    s_moment_of,
    effective_dimension,
)
from setmeans.seqform import SeqForm, seq_const, seq_n
from setmeans.sets import (
    FractalPart,
    FractalRow,
    affine,
    clip,
    family_set,
    fractal_set,
    interval_set,
    normalize,
    point_set,
    union,
)

CANTOR = [(F(1, 3), F(0)), (F(1, 3), F(2, 3))]
QUARTER = [(F(1, 4), F(0)), (F(1, 4), F(3, 4))]


def riemann_oracle(density, h, n_per_piece=4000):
    """Midpoint-rule mass and moment over an explicit bounded set."""
    mass = 0.0
    moment = 0.0
    pieces = [(float(itv.lo.finite), float(itv.hi.finite)) for itv in h.intervals]
    for fam in h.families:
        n = fam.n_start
        while fam.n_end is None or n <= fam.n_end:
            lo, hi = fam.block(n)
            if float(hi - lo) > 0:
                pieces.append((float(lo), float(hi)))
            n += 1
            if fam.n_end is None and float(lo) > 1e6:
                break
    for a, b in pieces:
        width = (b - a) / n_per_piece
        for i in range(n_per_piece):
            x = a + (i + 0.5) * width
            mass += density(x) * width
            moment += x * density(x) * width
    return mass, moment


def test_lebesgue_examples():
    tail = family_set(seq_n(), SeqForm.term(1, F(1, 2), 0), 1)
    assert measure_of(LEBESGUE, tail) == ExtReal(F(1))
    assert measure_of(LEBESGUE, interval_set(0, POS_INF)).is_pos_inf
    assert moment_of(LEBESGUE, interval_set(2, 4)).value == 6
    both = interval_set(NEG_INF, POS_INF, False, False)
    assert moment_of(LEBESGUE, both).kind == "divergent"


def test_harmonic_examples():
    assert measure_of(HARMONIC, interval_set(1, POS_INF)) == ExtReal(F(1))
    assert moment_of(HARMONIC, interval_set(1, POS_INF)).value == 2
    assert measure_of(HARMONIC, interval_set(1, 2)) == ExtReal(F(3, 4))
    assert moment_of(HARMONIC, interval_set(1, 2)).value == 1
    with pytest.raises(MeasureDomainError):
        measure_of(HARMONIC, interval_set(-1, 2))
    assert measure_of(HARMONIC, interval_set(0, 1, False, True)).is_pos_inf


def test_riemann_oracle_agreement_random_sets():
    rng = random.Random(987)
    for _ in range(50):
        parts = []
        for _ in range(rng.randint(1, 3)):
            a = F(rng.randint(12, 600), 12)  # positive so harmonic applies too
            w = F(rng.randint(1, 48), 12)
            parts.append(interval_set(a, a + w))
        h = union(*parts)
        m = float(measure_of(LEBESGUE, h).finite)
        mo = float(moment_of(LEBESGUE, h).value)
        om, omo = riemann_oracle(lambda x: 1.0, h)
        assert abs(m - om) <= 1e-6 * max(1.0, abs(om))
        assert abs(mo - omo) <= 1e-6 * max(1.0, abs(omo))
        hm = float(measure_of(HARMONIC, h).finite)
        hmo = float(moment_of(HARMONIC, h).value)
        ohm, ohmo = riemann_oracle(lambda x: 2.0 / x**3, h)
        assert abs(hm - ohm) <= 1e-6 * max(1e-6, abs(ohm))
        assert abs(hmo - ohmo) <= 1e-6 * max(1e-6, abs(ohmo))


def test_family_series_vs_riemann():
    tail = family_set(seq_n(), SeqForm.term(1, F(1, 2), 0), 1)
    bounded = clip(tail, 0, 40)
    m = float(measure_of(HARMONIC, bounded).finite)
    om, _ = riemann_oracle(lambda x: 2.0 / x**3, bounded)
    assert abs(m - om) <= 1e-5 * om


def test_additivity_over_components():
    a = interval_set(0, 1)
    b = interval_set(3, 5)
    c = point_set(7)
    h = union(a, b, c)
    total = measure_of(LEBESGUE, h).finite
    assert total == measure_of(LEBESGUE, a).finite + measure_of(LEBESGUE, b).finite
    assert moment_of(LEBESGUE, h).value == (
        moment_of(LEBESGUE, a).value + moment_of(LEBESGUE, b).value
    )


def test_translation_covariance():
    rng = random.Random(5150)
    for _ in range(20):
        a = F(rng.randint(-60, 60), 6)
        w = F(rng.randint(1, 30), 6)
        t = F(rng.randint(-40, 40), 3)
        h = union(interval_set(a, a + w), point_set(a - 2))
        ht = affine(h, 1, t)
        assert measure_of(LEBESGUE, ht) == measure_of(LEBESGUE, h)
        assert (
            moment_of(LEBESGUE, ht).value
            == moment_of(LEBESGUE, h).value + t * measure_of(LEBESGUE, h).finite
        )


def test_measure_nonnegative_on_catalog():
    from setmeans.catalog import build_catalog

    for name, h in build_catalog().items():
        try:
            m = measure_of(LEBESGUE, h)
        except MeasureDomainError:
            continue
        assert m.is_pos_inf or m.finite >= 0, name


def test_ifs_stats():
    cantor = FractalPart(CANTOR)
    s, mass, mean = ifs_invariant_stats(cantor)
    assert abs(s - math.log(2) / math.log(3)) < 1e-12
    assert mass == 1 and mean == F(1, 2)
    quarter = FractalPart(QUARTER)
    assert abs(quarter.s - 0.5) < 1e-12
    assert quarter.mean() == F(1, 2)
    with pytest.raises(Exception):
        FractalPart([(F(1, 2), F(0))])  # single map: no dimension in (0, 1]


def test_ifs_fixed_point_identity():
    # the invariant mean satisfies m = sum w_i (r_i m + t_i) exactly
    for maps in (CANTOR, QUARTER, [(F(1, 5), F(0)), (F(1, 5), F(2, 5)), (F(1, 5), F(4, 5))]):
        fr = FractalPart(maps)
        m = fr.base_mean()
        ws = fr.weights
        recon = sum(float(w) * (float(r) * float(m) + float(t)) for w, (r, t) in zip(ws, maps))
        assert abs(float(m) - recon) < 1e-12


def test_chaos_game_oracle():
    numpy = pytest.importorskip("numpy")
    rng = numpy.random.default_rng(42)
    for maps in (CANTOR, QUARTER):
        fr = FractalPart(maps)
        ws = numpy.array([float(w) for w in fr.weights])
        rs = numpy.array([float(r) for r, _ in maps])
        ts = numpy.array([float(t) for _, t in maps])
        n = 200_000
        idx = rng.choice(len(maps), size=n, p=ws / ws.sum())
        x = 0.5
        xs = numpy.empty(n)
        for i in range(n):
            x = rs[idx[i]] * x + ts[idx[i]]
            xs[i] = x
        assert abs(xs[5_000:].mean() - float(fr.mean())) < 5e-3


def test_s_measure_dimensions():
    cset = fractal_set(CANTOR)
    s = FractalPart(CANTOR).s
    assert float(s_measure_of(s, cset).finite) == 1.0
    # measuring with too small an s blows up; too large gives zero
    assert s_measure_of(s - 0.2, cset).is_pos_inf
    assert s_measure_of(s + 0.2, cset) == ExtReal(F(0))
    assert s_measure_of(0.5, interval_set(0, 1)).is_pos_inf
    assert s_measure_of(0.0, point_set(1, 2, 5)) == ExtReal(F(3))
    assert s_moment_of(0.0, point_set(1, 2, 5)).value == 8


def test_row_measure_and_moment():
    base3 = FractalPart([(F(1, 8), F(0)), (F(1, 8), F(7, 8))])
    row = normalize([FractalRow(base3, seq_n(), SeqForm.term(F(1, 4), 1, -2), 1)])
    m = s_measure_of(base3.s, row)
    assert m.is_finite and abs(float(m.finite) - math.pi**2 / 24) < 1e-6
    assert s_moment_of(base3.s, row).kind == "+inf"


def test_effective_dimension():
    cset = fractal_set(CANTOR)
    assert effective_dimension(union(interval_set(0, 1), affine(cset, 1, 2))) == 1.0
    assert abs(effective_dimension(cset) - math.log(2) / math.log(3)) < 1e-12
    assert effective_dimension(point_set(3)) == 0.0
