"""Extending a bounded-set mean to unbounded sets by window limits.

The extension of a mean K at a set H is the joint limit of K(H ∩ [x, y]) as
x -> -inf and y -> +inf, when it exists.  Numerically the verdict is decided
on a lattice of dyadic windows: Finite when a Cauchy box stabilizes (all
values with window index at least k0 lie within tol of each other), PlusInf
or MinusInf when the diagonal escapes past the divergence threshold
monotonically, and Divergent when two subsequential window values stay
separated.  Verdicts are only claims about the schedule used; the result
carries the schedule so a caller can retry with a longer one.

For monotone means on sets bounded on one side the two-sided limit
degenerates to a one-sided monotone limit, which is used as a fast path.

The Cesàro cross-check integrates K(H ∩ [x, y]) over the square (-p, p)^2
with a midpoint rule and averages over the windows where K is defined,
reporting the fraction it had to skip.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .extreal import ExtReal, NEG_INF, POS_INF
from .meanvalue import MeanValue
from .means import Mean
from .measures import MeasureSpec, measure_of, moment_of
from .sets import RealSet, SetDomainError, UnsupportedClipError, clip


@dataclass(frozen=True)
class WindowSchedule:
    """Dyadic window corners x_k = -base**k, y_k = base**k for k <= k_max."""

    k_max: int = 48
    tol: float = 1e-8
    big: float = 1e12
    base: int = 2

    def xs(self) -> List[Fraction]:
        return [-(Fraction(self.base) ** k) for k in range(self.k_max + 1)]

    def ys(self) -> List[Fraction]:
        return [Fraction(self.base) ** k for k in range(self.k_max + 1)]

    def describe(self) -> str:
        return f"x_k=-{self.base}^k, y_k={self.base}^k, k<={self.k_max}, tol={self.tol}, big={self.big}"


DEFAULT_SCHEDULE = WindowSchedule()


@dataclass
class ExtensionResult:
    value: MeanValue
    converged: bool
    k0: Optional[int]
    trace: List[Tuple[int, Fraction, Fraction, MeanValue]]
    schedule: WindowSchedule
    fast_path: bool = False
    note: str = ""

    def pretty(self) -> str:
        v = self.value.pretty()
        if self.value.is_finite and self.converged:
            return f"{v} (converged, k0={self.k0})"
        if self.value.is_infinite:
            return f"{v} (diverges to infinity within schedule)"
        if self.value.kind == "divergent":
            return f"divergent ({self.note})"
        return f"{v} ({self.note})" if self.note else v


def _window_value(mean: Mean, h: RealSet, x: Fraction, y: Fraction) -> Optional[MeanValue]:
    """K(H ∩ [x, y]); None when the window misses H entirely."""
    piece = clip(h, x, y)
    if piece.is_empty:
        return None
    return mean(piece)


def extend_mean(mean: Mean, h: RealSet, sched: WindowSchedule = DEFAULT_SCHEDULE) -> ExtensionResult:
    """The window-limit extension of ``mean`` evaluated at ``h``."""
    if h.is_empty:
        return ExtensionResult(MeanValue.undefined("empty set"), False, None, [], sched)
    b = h.bounds()
    if mean.monotone and (b.inf.is_finite or b.sup.is_finite):
        return _extend_one_sided(mean, h, sched, from_below=b.inf.is_finite)
    return _extend_lattice(mean, h, sched)


def _find_k0(vals: Sequence[Optional[float]], tol: float) -> Optional[int]:
    """Smallest index from which all later defined values stay within tol."""
    defined = [(i, v) for i, v in enumerate(vals) if v is not None]
    if len(defined) < 2:
        return None
    for start, _ in defined:
        tail = [v for i, v in defined if i >= start]
        if len(tail) < 2:
            return None
        if any(math.isinf(v) or math.isnan(v) for v in tail):
            continue
        if max(tail) - min(tail) <= tol:
            return start
    return None


def _extend_one_sided(mean: Mean, h: RealSet, sched: WindowSchedule, from_below: bool) -> ExtensionResult:
    b = h.bounds()
    if from_below:
        anchor = b.inf.finite
        anchor = Fraction(math.floor(anchor)) - 1
        corners = sched.ys()
    else:
        anchor = b.sup.finite
        anchor = Fraction(math.ceil(anchor)) + 1
        corners = sched.xs()
    trace: List[Tuple[int, Fraction, Fraction, MeanValue]] = []
    values: List[Optional[MeanValue]] = []
    last_undef = None
    for k, corner in enumerate(corners):
        x, y = (anchor, corner) if from_below else (corner, anchor)
        if y < x:
            values.append(None)
            continue
        v = _window_value(mean, h, x, y)
        if v is not None and v.kind == "undefined":
            # degenerate small windows may fall outside Dom K; the limit only
            # depends on the window tail, so they matter only if they persist
            last_undef = (k, x, y, v)
            values.append(None)
            continue
        values.append(v)
        if v is not None:
            trace.append((k, x, y, v))
    if last_undef is not None and last_undef[0] >= sched.k_max - 4:
        _, x, y, v = last_undef
        return ExtensionResult(
            MeanValue.undefined(f"window [{x},{y}] leaves the mean's domain: {v.note}"),
            False,
            None,
            trace,
            sched,
            fast_path=True,
        )
    if last_undef is not None:
        values = [None] * (last_undef[0] + 1) + values[last_undef[0] + 1 :]
    floats = [None if v is None else v.as_float() if v.is_defined else math.nan for v in values]
    defined = [f for f in floats if f is not None]
    if not defined:
        return ExtensionResult(
            MeanValue.undefined("no window met the set"), False, None, trace, sched, True
        )
    tail = defined[-5:]
    if all(f >= sched.big for f in tail) and _nondecreasing(tail):
        return ExtensionResult(MeanValue.plus_inf(), True, None, trace, sched, True)
    if all(f <= -sched.big for f in tail) and _nondecreasing([-f for f in tail]):
        return ExtensionResult(MeanValue.minus_inf(), True, None, trace, sched, True)
    k0 = _find_k0(floats, sched.tol)
    if k0 is not None and k0 <= sched.k_max - 3:
        exact = _exact_stable([v for v in values if v is not None])
        final = exact if exact is not None else MeanValue.finite(defined[-1])
        return ExtensionResult(final, True, k0, trace, sched, True)
    return ExtensionResult(
        MeanValue.divergent("one-sided limit not resolved within schedule"),
        False,
        None,
        trace,
        sched,
        True,
        note=f"last values {defined[-3:]}",
    )


def _nondecreasing(xs: Sequence[float]) -> bool:
    return all(a <= b + 1e-15 for a, b in zip(xs, xs[1:]))


def _exact_stable(values: Sequence[MeanValue]) -> Optional[MeanValue]:
    """The exact common value when the trailing window values agree exactly."""
    tail = values[-3:]
    if len(tail) < 2:
        return None
    if all(v.is_finite and isinstance(v.value, Fraction) for v in tail) and len(
        {v.value for v in tail}
    ) == 1:
        return tail[-1]
    return None


def _extend_lattice(mean: Mean, h: RealSet, sched: WindowSchedule) -> ExtensionResult:
    xs, ys = sched.xs(), sched.ys()
    kmax = sched.k_max
    cells: dict = {}
    trace: List[Tuple[int, Fraction, Fraction, MeanValue]] = []

    def cell(i: int, j: int):
        if (i, j) not in cells:
            v = _window_value(mean, h, xs[i], ys[j])
            cells[(i, j)] = v
        return cells[(i, j)]

    stages = [k for k in (8, 16, 24, 32, 40, kmax) if k <= kmax]
    if stages[-1] != kmax:
        stages.append(kmax)
    max_undef = -1
    undef_witness = None
    for stage in stages:
        for i in range(stage + 1):
            for j in range(stage + 1):
                if (i, j) in cells:
                    continue
                v = cell(i, j)
                if v is not None and v.kind == "undefined":
                    # ignore unless such windows persist at large indices
                    cells[(i, j)] = None
                    if min(i, j) > max_undef:
                        max_undef = min(i, j)
                        undef_witness = (xs[i], ys[j], v)
        if max_undef >= kmax - 4:
            x, y, v = undef_witness
            return ExtensionResult(
                MeanValue.undefined(f"window [{x},{y}] leaves the mean's domain: {v.note}"),
                False,
                None,
                trace,
                sched,
            )
        for k in range(stage + 1):
            v = cells.get((k, k))
            if v is not None and not any(t[0] == k for t in trace):
                trace.append((k, xs[k], ys[k], v))
        verdict = _lattice_verdict(cells, stage, sched, min_k0=max_undef + 1)
        if verdict is not None and stage < kmax and verdict[0].is_finite:
            value, k0 = verdict
            if k0 is not None and k0 <= stage - 4:
                return ExtensionResult(value, True, k0, trace, sched)
        if verdict is not None and stage == kmax:
            value, k0 = verdict
            return ExtensionResult(value, value.is_defined, k0, trace, sched)
    # full lattice evaluated, no verdict: classify divergence
    tail_vals = [
        v.as_float()
        for (i, j), v in cells.items()
        if v is not None and v.is_defined and i >= kmax - 8 and j >= kmax - 8
    ]
    if tail_vals:
        note = f"tail spread [{min(tail_vals):.6g}, {max(tail_vals):.6g}] exceeds tol"
    else:
        note = "no defined windows in the tail"
    return ExtensionResult(MeanValue.divergent(note), False, None, trace, sched)


def _lattice_verdict(cells: dict, k: int, sched: WindowSchedule, min_k0: int = 0):
    """(value, k0) from the filled (k+1)x(k+1) lattice, or None when open."""
    diag = [cells.get((i, i)) for i in range(k + 1)]
    diag_f = [
        None if v is None else (v.as_float() if v.is_defined else math.nan) for v in diag
    ]
    tail = [f for f in diag_f[-5:] if f is not None]
    if len(tail) >= 3 and all(f >= sched.big for f in tail) and _nondecreasing(tail):
        return MeanValue.plus_inf(), None
    if len(tail) >= 3 and all(f <= -sched.big for f in tail) and _nondecreasing([-f for f in tail]):
        return MeanValue.minus_inf(), None
    # Cauchy box: all defined cells with i, j >= k0 within tol
    best_k0 = None
    for k0 in range(min_k0, k - 1):
        box = [
            v
            for (i, j), v in cells.items()
            if i >= k0 and j >= k0 and i <= k and j <= k and v is not None
        ]
        if not box:
            continue
        if any(not v.is_defined for v in box):
            continue
        fs = [v.as_float() for v in box]
        if any(math.isinf(f) for f in fs):
            continue
        if max(fs) - min(fs) <= sched.tol:
            best_k0 = k0
            break
    if best_k0 is None:
        return None
    box_vals = [
        v
        for (i, j), v in sorted(cells.items())
        if i >= best_k0 and j >= best_k0 and i <= k and j <= k and v is not None
    ]
    exact = _exact_stable(box_vals)
    final = exact if exact is not None else MeanValue.finite(box_vals[-1].as_float())
    return final, best_k0


def trace_to_csv_rows(result: ExtensionResult) -> List[str]:
    """CSV rows 'k,x,y,value' with 12-significant-digit decimals."""
    rows = ["k,x,y,value"]
    for k, x, y, v in result.trace:
        if v.is_finite:
            s = f"{float(v.value):.12g}"
        elif v.kind == "+inf":
            s = "+inf"
        elif v.kind == "-inf":
            s = "-inf"
        else:
            s = v.kind
        rows.append(f"{k},{float(x):.12g},{float(y):.12g},{s}")
    return rows


# ---------------------------------------------------------------------------
# Cesàro double-average cross-check


@dataclass(frozen=True)
class CesaroPoint:
    p: int
    value: float
    undefined_fraction: float
    grid: int


class _CumulativeTable:
    """Float cumulative (mass, moment) of a density measure over H ∩ [-P, P].

    Window means then cost two binary searches, which is what makes the
    n x n Cesàro grid affordable.
    """

    def __init__(self, mu: MeasureSpec, h: RealSet, p_max: int):
        pieces: List[Tuple[float, float]] = []  # disjoint (lo, hi) floats
        P = Fraction(p_max)
        for itv in h.intervals:
            lo = max(itv.lo, ExtReal(-P))
            hi = min_e(itv.hi, ExtReal(P))
            if hi < lo:
                continue
            pieces.append((lo.as_float(), hi.as_float()))
        for fam in h.families:
            n = fam.n_start
            steps = 0
            while True:
                if fam.n_end is not None and n > fam.n_end:
                    break
                lo, hi = fam.block_float(n)
                if lo > p_max and fam.increasing:
                    break
                if hi < -p_max and not fam.increasing:
                    break
                if hi >= -p_max and lo <= p_max:
                    pieces.append((max(lo, -p_max), min(hi, p_max)))
                n += 1
                steps += 1
                if steps > 500000:
                    raise SetDomainError("family has too many blocks inside the grid")
        for p in h.points:
            pass  # null mass
        if h.fractals or h.rows:
            raise SetDomainError("cumulative table supports interval/family sets")
        pieces.sort()
        self.los = [a for a, _ in pieces]
        self.f = mu.F.eval_float
        self.g = mu.G.eval_float
        self.pieces = pieces
        self.cum_mass = [0.0]
        self.cum_mom = [0.0]
        for a, bb in pieces:
            self.cum_mass.append(self.cum_mass[-1] + self.f(bb) - self.f(a))
            self.cum_mom.append(self.cum_mom[-1] + self.g(bb) - self.g(a))

    def _cums(self, x: float) -> Tuple[float, float]:
        idx = bisect.bisect_right(self.los, x)
        mass = self.cum_mass[idx]
        mom = self.cum_mom[idx]
        if idx > 0:
            a, bb = self.pieces[idx - 1]
            if x < bb:
                mass -= self.f(bb) - self.f(max(a, x))
                mom -= self.g(bb) - self.g(max(a, x))
        return mass, mom

    def window_mean(self, u: float, v: float) -> Optional[float]:
        m1, w1 = self._cums(u)
        m2, w2 = self._cums(v)
        mass = m2 - m1
        if mass <= 1e-300:
            return None
        return (w2 - w1) / mass


def min_e(a: ExtReal, b: ExtReal) -> ExtReal:
    return a if a < b else b


def cesaro_average(
    mean: Mean,
    h: RealSet,
    p_schedule: Sequence[int] = (4, 8, 16, 32, 64),
    grid: int = 256,
) -> List[CesaroPoint]:
    """Midpoint-rule double average of K(H ∩ [x, y]) over (-p, p)^2.

    Windows where K is undefined (or the window misses H) are excluded from
    the average and reported as the undefined fraction; the integrability
    hypothesis behind the identity is assumed, not verified.
    """
    if h.is_empty:
        raise SetDomainError("Cesàro average of the empty set")
    table: Optional[_CumulativeTable] = None
    if mean.measure is not None:
        try:
            table = _CumulativeTable(mean.measure, h, max(p_schedule))
        except SetDomainError:
            table = None
    out: List[CesaroPoint] = []
    for p in p_schedule:
        total = 0.0
        count = 0
        skipped = 0
        if table is not None:
            mids = [(-p + (2 * r + 1) * p / grid) for r in range(grid)]
            for i, a in enumerate(mids):
                for bb in mids[i:]:
                    f = table.window_mean(a, bb)
                    weight = 1 if a == bb else 2  # unordered pair counts twice
                    if f is None:
                        skipped += weight
                    else:
                        total += weight * f
                        count += weight
        else:
            mids_q = [Fraction(-p) + Fraction((2 * r + 1) * p, grid) for r in range(grid)]
            for i, a in enumerate(mids_q):
                for bb in mids_q[i:]:
                    v = _window_value(mean, h, a, bb)
                    weight = 1 if a == bb else 2
                    if v is None or not v.is_defined or v.is_infinite:
                        skipped += weight
                    else:
                        total += weight * v.as_float()
                        count += weight
        denom = count + skipped
        out.append(
            CesaroPoint(
                p=p,
                value=total / count if count else math.nan,
                undefined_fraction=skipped / denom if denom else 1.0,
                grid=grid,
            )
        )
    return out
