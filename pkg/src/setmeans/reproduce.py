"""The golden-value table: every closed-form value the theory pins down.

``run_reproduction`` evaluates each row through the public evaluators and
prints one PASS/FAIL line per row.  Expected values are exact rationals or
carry an explicit tolerance.  One row (harmonic-shift-limit) is knowingly
inconsistent with the harmonic measure's moment antiderivative and fails;
see the README's known-issues note.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

from .catalog import (
    CANTOR3_MAPS,
    DIM09_MAPS,
    geometric_tail_set,
    infinite_mean_row,
    naturals,
    unit_reciprocals,
)
from .extension import extend_mean
from .extreal import POS_INF
from .means import avg_eval, get_mean, mlis_eval
from .seqform import SeqForm, seq_n
from .sets import RealSet, affine, clip, family_set, fractal_set, interval_set, union

F = Fraction


@dataclass
class Row:
    row_id: str
    description: str
    expected: str
    got: str
    passed: bool


def _finite(v) -> Optional[float]:
    return float(v.value) if v.is_finite else None


def run_reproduction() -> List[Row]:
    rows: List[Row] = []

    def add(row_id: str, desc: str, expected: str, got: str, passed: bool):
        rows.append(Row(row_id, desc, expected, got, passed))

    mhar = get_mean("mmu:harmonic")
    avg1 = get_mean("avg1")
    avg1_b = get_mean("bounded:avg1")

    # harmonic-measure golden values
    v = mhar(interval_set(1, POS_INF))
    add("harmonic-ray-base", "harmonic mean of [1,inf)", "2", v.pretty(), v.is_finite and v.value == 2)
    for a in (F(1), F(2), F(5, 2)):
        v = mhar(interval_set(a, POS_INF))
        add(
            f"harmonic-ray-{a}",
            f"harmonic mean of [{a},inf)",
            str(2 * a),
            v.pretty(),
            v.is_finite and v.value == 2 * a,
        )

    # translated-interval limit (expected value knowingly inconsistent; the
    # computed value is the harmonic mean of [1,2], i.e. 4/3)
    x = F(2) ** 20
    v = mhar(union(interval_set(1, 2), interval_set(1 + x, 2 + x)))
    got = _finite(v)
    add(
        "harmonic-shift-limit",
        "harmonic mean of [1,2] u ([1,2]+2^20)",
        "2/3 (tol 1e-6)",
        v.pretty(),
        got is not None and abs(got - 2 / 3) <= 1e-6,
    )

    # Avg^1 of the geometric tail set and its clips
    tail = geometric_tail_set()
    for n in (1, 2, 5, 10):
        piece = clip(tail, n, POS_INF)
        v = avg1(piece)
        want = F(n) + 1 + F(1, 3 * 2**n)
        add(
            f"tail-clip-{n}",
            f"Avg^1 of union_(i>={n}) [i, i+2^-i]",
            str(want),
            v.pretty(),
            v.is_finite and v.value == want,
        )
    ext = extend_mean(avg1_b, tail)
    got = _finite(ext.value)
    add(
        "tail-extension",
        "window-limit extension on the full tail set",
        "13/6 (tol 1e-8)",
        ext.pretty(),
        ext.converged and got is not None and abs(got - 13 / 6) <= 1e-8,
    )

    # block-family mean formula: (sum b_n c_n + sum c_n^2 / 2) / sum c_n
    f1 = family_set(seq_n() * seq_n(), SeqForm.term(1, F(1, 2), 0), 1)
    v = avg1(f1)
    want = (F(6) + F(1, 2) * F(1, 3)) / F(1)  # sums: 6, 1/3, 1 (closed forms)
    add(
        "blocks-squares",
        "Avg^1 of blocks b=n^2, c=2^-n vs the series formula",
        str(want),
        v.pretty(),
        v.is_finite and abs(float(v.value) - float(want)) <= 1e-9,
    )
    f2 = family_set(SeqForm.term(1, 2, 0), SeqForm.term(1, F(1, 2), -2), 1)
    v = avg1(f2)
    add(
        "blocks-pow2-thin",
        "Avg^1 of blocks b=2^n, c=1/(n^2 2^n): sum b*c finite",
        "finite",
        v.pretty(),
        v.is_finite,
    )
    f3 = family_set(SeqForm.term(1, 2, 0), SeqForm.term(1, F(1, 2), 0), 1)
    v = avg1(f3)
    add(
        "blocks-pow2-unit",
        "Avg^1 of blocks b=2^n, c=2^-n: sum b*c divergent",
        "+inf",
        v.pretty(),
        v.kind == "+inf",
    )

    # liminf/limsup mean vs its window extension
    h = union(naturals(), unit_reciprocals())
    ext = extend_mean(get_mean("mlis"), h)
    got = _finite(ext.value)
    add(
        "mlis-extension",
        "extension of the liminf/limsup mean on N u {1/n}",
        "0",
        ext.pretty(),
        ext.converged and got == 0.0,
    )
    b = h.bounds()
    naive = "+inf" if b.limsup.is_pos_inf else "finite"
    add(
        "mlis-naive",
        "(liminf + limsup)/2 of N u {1/n} without the extension",
        "+inf",
        naive,
        naive == "+inf",
    )

    # mixed-dimension witness
    mixed = union(interval_set(0, 1), affine(fractal_set(DIM09_MAPS), 1, 2))
    v = avg_eval(mixed)
    add(
        "mixed-dimension",
        "Avg of [0,1] u (0.9-dim attractor + 2)",
        "1/2",
        v.pretty(),
        v.is_finite and v.value == F(1, 2),
    )
    row_set = infinite_mean_row()
    v = avg_eval(row_set)
    add(
        "row-infinite-mean",
        "Avg of the 1/3-dim row with masses n^-2/4",
        "+inf",
        v.pretty(),
        v.kind == "+inf",
    )

    # Cantor symmetry (exact: equal ratios force equal rational weights)
    v = avg_eval(fractal_set(CANTOR3_MAPS))
    add(
        "cantor-mean",
        "Avg^s of the ternary Cantor set",
        "1/2 exactly",
        v.pretty(),
        v.is_finite and v.value == F(1, 2),
    )
    return rows


def format_rows(rows: List[Row]) -> List[str]:
    width = max(len(r.row_id) for r in rows)
    out = []
    for r in rows:
        mark = "PASS" if r.passed else "FAIL"
        out.append(
            f"{mark}  {r.row_id:<{width}}  expected {r.expected}; got {r.got}"
        )
    passed = sum(1 for r in rows if r.passed)
    out.append(f"{passed}/{len(rows)} rows pass")
    return out
