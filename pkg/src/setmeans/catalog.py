"""The standing catalog of sets and means the property suites run against.

Sets cover the shapes the theory distinguishes: bounded/unbounded intervals,
finite point sets, block families with geometric and polynomial rules,
sequences accumulating at finite points, IFS attractors and an IFS row, and
a handful of mixed unions.  Generators for pairs/triples are deterministic
(fixed-seed PRNG) so suite verdicts are reproducible.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, Iterator, List, Tuple

from .extreal import POS_INF, NEG_INF
from .means import Mean, get_mean
from .seqform import SeqForm, seq_const, seq_n
from .sets import (
    FractalPart,
    FractalRow,
    RealSet,
    affine,
    family_set,
    fractal_set,
    interval_set,
    normalize,
    point_set,
    union,
)

F = Fraction

CANTOR3_MAPS = ((F(1, 3), F(0)), (F(1, 3), F(2, 3)))
CANTOR4_MAPS = ((F(1, 4), F(0)), (F(1, 4), F(3, 4)))
DIM13_MAPS = ((F(1, 8), F(0)), (F(1, 8), F(7, 8)))  # dimension 1/3
DIM09_MAPS = ((F(463, 1000), F(0)), (F(463, 1000), F(537, 1000)))  # dim ~0.9


def geometric_tail_set(n_start: int = 1) -> RealSet:
    """union over i >= n_start of [i, i + 2^-i]."""
    return family_set(seq_n(), SeqForm.term(1, F(1, 2), 0), n_start)


def naturals(n_start: int = 1) -> RealSet:
    return family_set(seq_n(), seq_const(0), n_start)


def unit_reciprocals(n_start: int = 1) -> RealSet:
    """{1/n : n >= n_start}, accumulating at 0."""
    return family_set(SeqForm.term(1, 1, -1), seq_const(0), n_start)


def powers_of_two() -> RealSet:
    return family_set(SeqForm.term(1, 2, 0), seq_const(0), 0)


def squares() -> RealSet:
    return family_set(seq_n() * seq_n(), seq_const(0), 1)


def infinite_mean_row(maps=DIM13_MAPS) -> RealSet:
    """s-set with finite mass but infinite first moment: copies at n with
    masses n^-2 / 4."""
    base = FractalPart(maps)
    return normalize([FractalRow(base, seq_n(), SeqForm.term(F(1, 4), 1, -2), 1)])


def build_catalog() -> Dict[str, RealSet]:
    cat: Dict[str, RealSet] = {}
    cat["unit"] = interval_set(0, 1)
    cat["unit-shifted"] = interval_set(5, 6)
    cat["sym-unit"] = interval_set(-1, 1)
    cat["wide"] = interval_set(-3, 7)
    cat["two-blocks"] = union(interval_set(0, 1), interval_set(2, 3))
    cat["two-blocks-far"] = union(interval_set(0, 1), interval_set(10, 13))
    cat["neg-blocks"] = union(interval_set(-6, -5), interval_set(-3, -2))
    cat["open-unit"] = interval_set(0, 1, False, False)
    cat["half-open"] = interval_set(0, 2, True, False)
    cat["points"] = point_set(1, 2, 5)
    cat["single-point"] = point_set(F(3, 2))
    cat["unit-and-point"] = union(interval_set(0, 1), point_set(5))
    cat["harmonic-base"] = interval_set(1, 2)
    cat["harmonic-pair"] = union(interval_set(1, 2), interval_set(3, 4))
    cat["harmonic-ray"] = interval_set(1, POS_INF)
    cat["harmonic-ray-2"] = interval_set(2, POS_INF)
    cat["ray-up"] = interval_set(0, POS_INF)
    cat["ray-down"] = interval_set(NEG_INF, 0)
    cat["geom-tail"] = geometric_tail_set()
    cat["geom-tail-5"] = geometric_tail_set(5)
    cat["sym-geom-tail"] = union(geometric_tail_set(), affine(geometric_tail_set(), -1, 0))
    cat["sym-geom-wide"] = union(
        geometric_tail_set(), affine(geometric_tail_set(), -1, 0), interval_set(-1, 1)
    )
    cat["squares-blocks"] = family_set(seq_n() * seq_n(), SeqForm.term(1, F(1, 2), 0), 1)
    cat["pow2-thin"] = family_set(
        SeqForm.term(1, 2, 0), SeqForm.term(1, F(1, 2), -2), 1
    )
    cat["pow2-unit-mass"] = family_set(SeqForm.term(1, 2, 0), SeqForm.term(1, F(1, 2), 0), 1)
    cat["naturals"] = naturals()
    cat["reciprocals"] = unit_reciprocals()
    # {1/(2n)} shares no value with any natural, so the union clips cleanly
    cat["nats-and-reciprocals"] = union(
        naturals(), family_set(SeqForm.term(F(1, 2), 1, -1), seq_const(0), 1)
    )
    cat["powers-of-two"] = powers_of_two()
    cat["squares"] = squares()
    cat["wide-blocks"] = family_set(seq_n() * 2, seq_const(1), 1)
    cat["log-blocks"] = family_set(seq_n(), SeqForm.term(1, 1, -1) * F(1, 2), 2)
    cat["cantor"] = fractal_set(CANTOR3_MAPS)
    cat["cantor-pair"] = union(fractal_set(CANTOR3_MAPS), affine(fractal_set(CANTOR3_MAPS), 1, 2))
    cat["quarter-ifs"] = fractal_set(CANTOR4_MAPS)
    cat["mixed-dim"] = union(interval_set(0, 1), affine(fractal_set(DIM09_MAPS), 1, 2))
    cat["ifs-row"] = infinite_mean_row()
    return cat


def bounded_catalog() -> Dict[str, RealSet]:
    return {k: v for k, v in build_catalog().items() if v.is_bounded}


def positive_catalog() -> Dict[str, RealSet]:
    out = {}
    for k, v in build_catalog().items():
        b = v.bounds()
        if b.inf > 0 or (b.inf == 0 and not v.contains(Fraction(0))):
            out[k] = v
    return out


def catalog_means() -> Dict[str, Mean]:
    names = [
        "mmu:lebesgue",
        "mmu:harmonic",
        "avg",
        "mlis",
        "midpoint",
        "gapinf",
        "hitsum",
        "anchor",
        "simple:midpoint",
        "recipext:midpoint",
    ]
    return {n: get_mean(n) for n in names}


# ---------------------------------------------------------------------------
# deterministic generators


def _rand_fraction(rng: random.Random, lo: int = -8, hi: int = 8, den: int = 12) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


def random_bounded_set(rng: random.Random) -> RealSet:
    parts = []
    for _ in range(rng.randint(1, 3)):
        a = _rand_fraction(rng)
        b = a + Fraction(rng.randint(1, 24), 12)
        parts.append(interval_set(a, b))
    if rng.random() < 0.4:
        parts.append(point_set(_rand_fraction(rng, -10, 10)))
    return union(*parts)


def ordered_pairs(count: int, seed: int = 20240211) -> Iterator[Tuple[RealSet, RealSet]]:
    """Pairs with sup H1 <= inf H2 (for plain monotonicity)."""
    rng = random.Random(seed)
    for _ in range(count):
        h1 = random_bounded_set(rng)
        gap = Fraction(rng.randint(0, 36), 12)
        hi = h1.bounds().sup.finite
        shift_by = hi + gap
        h2 = affine(random_bounded_set(rng), 1, shift_by + 20)
        lo2 = h2.bounds().inf.finite
        h2 = affine(h2, 1, shift_by - lo2 + gap)
        yield h1, h2


def disjoint_pairs(count: int, seed: int = 20240212) -> Iterator[Tuple[RealSet, RealSet]]:
    rng = random.Random(seed)
    made = 0
    while made < count:
        h1 = random_bounded_set(rng)
        h2 = affine(random_bounded_set(rng), 1, Fraction(rng.randint(25, 60)))
        yield h1, h2
        made += 1


def nested_triples(count: int, seed: int = 20240213) -> Iterator[Tuple[RealSet, RealSet, RealSet]]:
    """(H1 subset H2, K) with H2 and K disjoint, all bounded."""
    rng = random.Random(seed)
    for _ in range(count):
        a = _rand_fraction(rng, -6, 6)
        w1 = Fraction(rng.randint(2, 18), 12)
        w2 = w1 + Fraction(rng.randint(1, 18), 12)
        h1 = interval_set(a, a + w1)
        h2 = interval_set(a - Fraction(rng.randint(0, 12), 12), a + w2)
        if rng.random() < 0.5:
            h1 = union(h1, interval_set(a + w2 - Fraction(1, 6), a + w2))
            h2 = union(h2, h1)
        kl = a + w2 + Fraction(rng.randint(6, 30), 6)
        kw = Fraction(rng.randint(2, 24), 12)
        kset = interval_set(kl, kl + kw)
        yield h1, h2, kset


def shift_cases(count: int, seed: int = 20240214) -> Iterator[Tuple[RealSet, Fraction]]:
    rng = random.Random(seed)
    for _ in range(count):
        yield random_bounded_set(rng), _rand_fraction(rng, -20, 20)


def random_clip_windows(count: int, seed: int = 20240215) -> Iterator[Tuple[Fraction, Fraction]]:
    rng = random.Random(seed)
    for _ in range(count):
        x = _rand_fraction(rng, -40, 40, 8)
        y = x + Fraction(rng.randint(1, 320), 8)
        yield x, y
