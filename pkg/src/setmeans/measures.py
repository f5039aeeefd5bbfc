"""Borel measures with exact measure and first-moment evaluation on RealSets.

Two kinds of measure live here:

* density measures, given by a closed-form antiderivative ``F`` (so
  ``mu([a,b]) = F(b) - F(a)``) and a moment antiderivative ``G`` with
  ``G' = x * F'``.  Built-ins: Lebesgue (``F = x``, ``G = x^2/2``) and the
  harmonic-mean measure on (0, +inf) (``F = -1/x^2``, ``G = -2/x``, so
  ``mu([a,b]) = 1/a^2 - 1/b^2``).
* the natural self-similar s-measure carried by IFS components, normalized
  to mass one on a base attractor, used in place of s-dimensional Hausdorff
  measure (only ratios and means matter, so the absolute constant is
  irrelevant).

Improper endpoints are evaluated through antiderivative limits, never by
quadrature; block-family series are summed exactly when the antiderivative
is polynomial and otherwise by partial sums with a covering-interval
remainder bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .extreal import ExtReal, NEG_INF, POS_INF
from .meanvalue import MeanValue
from .seqform import SeqForm, SeriesSum
from .sets import (
    BlockFamily,
    Family,
    FractalPart,
    FractalRow,
    Interval,
    RealSet,
    SetDomainError,
    iv,
)

_DIM_TOL = 1e-9


class MeasureDomainError(SetDomainError):
    """The set has a component outside the measure's support."""


class UnknownSeriesError(ArithmeticError):
    """A family series exceeded its budget without a certified bound."""


# ---------------------------------------------------------------------------
# closed-form antiderivatives: finite sums of c * x**p, integer p


@dataclass(frozen=True)
class PowerForm:
    terms: Tuple[Tuple[Fraction, int], ...]  # (coef, power)

    @staticmethod
    def of(*terms) -> "PowerForm":
        return PowerForm(tuple((Fraction(c), int(p)) for c, p in terms))

    def __call__(self, x: Fraction) -> Fraction:
        total = Fraction(0)
        for c, p in self.terms:
            if p == 0:
                total += c
            elif x == 0 and p > 0:
                continue
            else:
                total += c * x**p
        return total

    @property
    def polynomial(self) -> bool:
        return all(p >= 0 for _, p in self.terms)

    def eval_float(self, x: float) -> float:
        total = 0.0
        for c, p in self.terms:
            if p == 0:
                total += float(c)
            elif x == 0.0 and p > 0:
                continue
            else:
                total += float(c) * x**p
        return total

    def derivative(self) -> "PowerForm":
        return PowerForm(
            tuple((c * p, p - 1) for c, p in self.terms if p != 0)
        )

    def limit_at(self, x: ExtReal, from_right: bool = True) -> ExtReal:
        """Value or one-sided limit of the form at x (handles 0 and +/-inf)."""
        if x.is_finite:
            v = x.finite
            if v == 0 and any(p < 0 for _, p in self.terms):
                # one-sided limit at zero; dominated by the most negative power
                c, p = min(((c, p) for c, p in self.terms if p < 0), key=lambda t: t[1])
                if from_right:
                    return POS_INF if c > 0 else NEG_INF
                sign = 1 if (p % 2 == 0) else -1
                return POS_INF if c * sign > 0 else NEG_INF
            return ExtReal(self(v))
        pos_terms = [(c, p) for c, p in self.terms if p > 0]
        if pos_terms:
            c, p = max(pos_terms, key=lambda t: t[1])
            if x.is_pos_inf:
                return POS_INF if c > 0 else NEG_INF
            sign = 1 if p % 2 == 0 else -1
            return POS_INF if c * sign > 0 else NEG_INF
        const = sum((c for c, p in self.terms if p == 0), Fraction(0))
        return ExtReal(const)

    def on_seq(self, f: SeqForm) -> Optional[SeqForm]:
        """Compose with a sequence form; stays closed only for polynomials."""
        if not self.polynomial:
            return None
        out = SeqForm({})
        for c, p in self.terms:
            acc = SeqForm.const(c)
            for _ in range(p):
                acc = acc * f
            out = out + acc
        return out


@dataclass(frozen=True)
class MeasureSpec:
    """A Borel measure: density kind (F, G, support) or the s-measure kind."""

    name: str
    kind: str  # "density" | "ifs"
    F: Optional[PowerForm] = None
    G: Optional[PowerForm] = None
    support: Optional[Interval] = None
    s: Optional[float] = None  # fixed dimension for kind="ifs"; None = auto


LEBESGUE = MeasureSpec(
    name="lebesgue",
    kind="density",
    F=PowerForm.of((1, 1)),
    G=PowerForm.of((Fraction(1, 2), 2)),
    support=iv(NEG_INF, POS_INF, False, False),
)

HARMONIC = MeasureSpec(
    name="harmonic",
    kind="density",
    F=PowerForm.of((-1, -2)),
    G=PowerForm.of((-2, -1)),
    support=iv(0, POS_INF, False, False),
)


def measure_by_name(name: str) -> MeasureSpec:
    if name == "lebesgue":
        return LEBESGUE
    if name == "harmonic":
        return HARMONIC
    raise KeyError(f"unknown measure {name!r}")


# ---------------------------------------------------------------------------
# support checks


def _check_support(mu: MeasureSpec, h: RealSet) -> None:
    sup = mu.support
    if sup is None or h.is_empty:
        return
    # the set may approach an open support edge but must not attain it
    b = h.bounds()
    if b.inf < sup.lo or b.sup > sup.hi:
        raise MeasureDomainError(f"set leaves the support of {mu.name}")
    if b.inf == sup.lo and not sup.lo_closed and b.inf.is_finite and h.contains(b.inf.finite):
        raise MeasureDomainError(f"set attains the open support edge of {mu.name}")
    if b.sup == sup.hi and not sup.hi_closed and b.sup.is_finite and h.contains(b.sup.finite):
        raise MeasureDomainError(f"set attains the open support edge of {mu.name}")


# ---------------------------------------------------------------------------
# density measures


def _interval_mass(F: PowerForm, itv: Interval) -> ExtReal:
    hi = F.limit_at(itv.hi, from_right=False)
    lo = F.limit_at(itv.lo, from_right=True)
    return hi - lo


def _interval_moment_parts(G: PowerForm, itv: Interval) -> Tuple[ExtReal, ExtReal]:
    """(positive part, negative part) of the moment over one interval."""
    zero = ExtReal(Fraction(0))
    pieces: List[Interval] = []
    if itv.lo < zero < itv.hi:
        pieces.append(Interval(itv.lo, zero, itv.lo_closed, True))
        pieces.append(Interval(zero, itv.hi, True, itv.hi_closed))
    else:
        pieces.append(itv)
    pos = ExtReal(Fraction(0))
    neg = ExtReal(Fraction(0))
    for piece in pieces:
        val = G.limit_at(piece.hi, from_right=False) - G.limit_at(piece.lo, from_right=True)
        if val >= zero:
            pos = pos + val
        else:
            neg = neg + val
    return pos, neg


def _family_series(fam: Family, F: PowerForm) -> SeriesSum:
    """sum over blocks of F(hi_n) - F(lo_n), symbolic when possible."""
    forms = fam.forms()
    if forms is not None and F.polynomial:
        b, c = forms
        term = F.on_seq(b + c) - F.on_seq(b)
        n_end = fam.n_end
        if n_end is None:
            return term.tail_sum(fam.n_start)
        return term.range_sum(fam.n_start, n_end)
    return _family_series_numeric(fam, F)


def _family_series_numeric(fam: Family, F: PowerForm) -> SeriesSum:
    """Partial sums with a rigorous remainder bound.

    Two tail bounds are tried once the running sum stabilizes:

    * density bound: remaining mass <= sup|F'| over the remaining region
      times the remaining total block length (needs the length tail in
      closed form and a sampled-monotone |F'| beyond the edge);
    * covering bound: the blocks beyond N sit inside the interval between
      block N+1 and the accumulation target, and F is monotone, so the tail
      is at most the F-measure of that interval.
    """
    dF = F.derivative()
    forms = fam.forms()
    c_form = forms[1] if forms is not None else None
    total = 0.0
    n = fam.n_start
    steps = 0
    best_bound = math.inf
    while True:
        if fam.n_end is not None and n > fam.n_end:
            return SeriesSum(total, 1e-13 * (abs(total) + 1.0))
        flo, fhi = fam.block_float(n)
        total += F.eval_float(fhi) - F.eval_float(flo)
        steps += 1
        if fam.n_end is None and steps >= 8 and steps % 8 == 0:
            bound = _series_tail_bound(fam, n + 1, F, dF, c_form)
            if bound is not None:
                best_bound = min(best_bound, bound)
                if bound <= 1e-9 * max(1.0, abs(total)):
                    return SeriesSum(total, bound + 1e-13 * abs(total))
        if steps > 120000:
            # slowly decaying tails: accept a looser (still rigorous) bound
            if best_bound <= 1e-4 * max(1.0, abs(total)):
                return SeriesSum(total, best_bound + 1e-13 * abs(total))
            raise UnknownSeriesError(
                "family series exceeded its budget without a certified bound"
            )
        n += 1


def _series_tail_bound(fam: Family, m: int, F: PowerForm, dF: PowerForm,
                       c_form) -> Optional[float]:
    t = fam.target
    lo_m, hi_m = fam.block_float(m)
    bounds: List[float] = []
    # covering bound (F monotone on the support)
    tf = F.limit_at(t, from_right=not fam.increasing)
    if tf.is_finite:
        if fam.increasing:
            cover = float(tf.finite) - F.eval_float(lo_m)
        else:
            cover = F.eval_float(hi_m) - float(tf.finite)
        bounds.append(abs(cover))
    # density bound: sup |F'| beyond the edge times the remaining length
    if c_form is not None and fam.increasing and lo_m > 0:
        ctail = c_form.tail_sum(m)
        if not ctail.infinite:
            dens = [abs(dF.eval_float(lo_m * (2.0**j))) for j in range(6)]
            if all(a >= b for a, b in zip(dens, dens[1:])):
                bounds.append(dens[0] * (float(ctail.value) + ctail.err))
        else:
            # per-block envelope: term_n <= c_n * |F'|(b_n); symbolic when
            # the position rule is a single invertible term
            env = _envelope_form(fam, dF, c_form)
            if env is not None:
                tail = env.tail_sum(m)
                if not tail.infinite:
                    bounds.append(abs(float(tail.value)) + tail.err)
    if not bounds:
        return None
    return min(bounds)


def _envelope_form(fam: Family, dF: PowerForm, c_form) -> Optional["SeqForm"]:
    if any(p > 0 for _, p in dF.terms):
        return None  # density not decreasing toward +inf; envelope invalid
    forms = fam.forms()
    if forms is None:
        return None
    b_form = forms[0]
    inv = b_form.reciprocal_term()
    env = None
    for coef, p in dF.terms:
        if p >= 0:
            piece = SeqForm.const(abs(coef))
            for _ in range(p):
                piece = piece * b_form
        else:
            if inv is None:
                return None
            piece = SeqForm.const(abs(coef))
            for _ in range(-p):
                piece = piece * inv
        env = piece if env is None else env + piece
    if env is None:
        return None
    return env * c_form


def _density_measure(mu: MeasureSpec, h: RealSet) -> ExtReal:
    total = ExtReal(Fraction(0))
    err = 0.0
    for itv in h.intervals:
        total = total + _interval_mass(mu.F, itv)
    for fam in h.families:
        if fam.degenerate:
            continue
        part = _family_series(fam, mu.F)
        if part.infinite > 0:
            return POS_INF
        if part.infinite < 0:
            raise MeasureDomainError("negative family mass: F not nondecreasing here")
        total = total + part.as_extreal()
    # points, fractals and rows are null for density measures (dim < 1)
    return total


def _density_moment(mu: MeasureSpec, h: RealSet) -> MeanValue:
    pos = ExtReal(Fraction(0))
    neg = ExtReal(Fraction(0))
    for itv in h.intervals:
        p, n = _interval_moment_parts(mu.G, itv)
        pos = pos + p
        neg = neg + n
    for fam in h.families:
        if fam.degenerate:
            continue
        part = _family_series(fam, mu.G)
        if part.infinite > 0:
            pos = pos + POS_INF
        elif part.infinite < 0:
            neg = neg + NEG_INF
        else:
            v = part.as_extreal()
            if v >= ExtReal(0):
                pos = pos + v
            else:
                neg = neg + v
    if pos.is_pos_inf and neg.is_neg_inf:
        return MeanValue.divergent("moment has infinite positive and negative parts")
    if pos.is_pos_inf:
        return MeanValue.plus_inf()
    if neg.is_neg_inf:
        return MeanValue.minus_inf()
    return MeanValue.finite(pos.finite + neg.finite)


# ---------------------------------------------------------------------------
# s-measures


def component_dimension(comp) -> float:
    """Effective dimension of one canonical component (for top-dim Avg)."""
    if isinstance(comp, Interval):
        return 0.0 if comp.is_point else 1.0
    if isinstance(comp, Fraction):
        return 0.0
    if isinstance(comp, FractalPart):
        return comp.s
    if isinstance(comp, FractalRow):
        return comp.s
    # families: degenerate = countable points, otherwise positive length
    return 0.0 if comp.degenerate else 1.0


def effective_dimension(h: RealSet) -> float:
    if h.is_empty:
        raise SetDomainError("dimension of the empty set")
    return max(component_dimension(c) for c in h.components())


def s_measure_of(s: float, h: RealSet) -> ExtReal:
    """mu^s(H) in natural units (base attractors carry mass one)."""
    total = 0.0
    exact_total = Fraction(0)
    for itv in h.intervals:
        if itv.is_point:
            continue
        if s < 1.0 - _DIM_TOL:
            return POS_INF
        m = _interval_mass(LEBESGUE.F, itv)
        if not m.is_finite:
            return POS_INF
        exact_total += m.finite
    for p in h.points:
        if s <= _DIM_TOL:
            exact_total += 1
    for fam in h.families:
        if fam.degenerate:
            if s <= _DIM_TOL:
                if fam.n_end is None:
                    return POS_INF
                exact_total += fam.n_end - fam.n_start + 1
            continue
        if s < 1.0 - _DIM_TOL:
            return POS_INF
        part = _family_series(fam, LEBESGUE.F)
        if part.infinite:
            return POS_INF
        v = part.as_extreal().finite
        if isinstance(v, Fraction):
            exact_total += v
        else:
            total += v
    for fr in h.fractals:
        if fr.s > s + _DIM_TOL:
            return POS_INF
        if fr.s >= s - _DIM_TOL:
            m = fr.mass()
            if isinstance(m, Fraction):
                exact_total += m
            else:
                total += m
    for row in h.rows:
        if row.s > s + _DIM_TOL:
            return POS_INF
        if row.s >= s - _DIM_TOL:
            part = row.mass.tail_sum(row.n_start)
            if part.infinite:
                return POS_INF
            total += row.mass_factor * float(part.value)
    if total == 0.0:
        return ExtReal(exact_total)
    return ExtReal(total + float(exact_total))


def s_moment_of(s: float, h: RealSet) -> MeanValue:
    pos = ExtReal(Fraction(0))
    neg = ExtReal(Fraction(0))

    def add(v: ExtReal):
        nonlocal pos, neg
        if v >= ExtReal(0):
            pos = pos + v
        else:
            neg = neg + v

    for itv in h.intervals:
        if itv.is_point or s < 1.0 - _DIM_TOL:
            continue
        p, n = _interval_moment_parts(LEBESGUE.G, itv)
        pos = pos + p
        neg = neg + n
    for p in h.points:
        if s <= _DIM_TOL:
            add(ExtReal(p))
    for fam in h.families:
        if fam.degenerate:
            if s <= _DIM_TOL and fam.n_end is not None:
                for n in range(fam.n_start, fam.n_end + 1):
                    add(ExtReal(fam.block(n)[0]))
            continue
        if s < 1.0 - _DIM_TOL:
            continue
        part = _family_series(fam, LEBESGUE.G)
        if part.infinite > 0:
            pos = pos + POS_INF
        elif part.infinite < 0:
            neg = neg + NEG_INF
        else:
            add(part.as_extreal())
    for fr in h.fractals:
        if abs(fr.s - s) <= _DIM_TOL:
            m, mn = fr.mass(), fr.mean()
            if isinstance(m, Fraction) and isinstance(mn, Fraction):
                add(ExtReal(m * mn))
            else:
                add(ExtReal(float(m) * float(mn)))
    for row in h.rows:
        if abs(row.s - s) <= _DIM_TOL:
            v = _row_moment(row)
            if v.is_pos_inf:
                pos = pos + POS_INF
            elif v.is_neg_inf:
                neg = neg + NEG_INF
            else:
                add(v)
    if pos.is_pos_inf and neg.is_neg_inf:
        return MeanValue.divergent("moment has infinite positive and negative parts")
    if pos.is_pos_inf:
        return MeanValue.plus_inf()
    if neg.is_neg_inf:
        return MeanValue.minus_inf()
    return MeanValue.finite(pos.finite + neg.finite)


def _row_moment(row: FractalRow) -> ExtReal:
    """sum over copies of mass_n * mean_n; the anchor part is symbolic."""
    anchor = (row.mass * row.pos).tail_sum(row.n_start)
    if anchor.infinite > 0:
        return POS_INF
    if anchor.infinite < 0:
        return NEG_INF
    # correction: mass_n * scale_n * (base_mean - hull_lo), bounded by the
    # decreasing copy widths times the remaining mass tail
    u, _ = row.base._whull
    coef = float(row.base.base_mean()) - float(u)
    total = 0.0
    n = row.n_start
    while True:
        total += row.copy_mass(n) * row.copy_scale(n) * coef
        tail = row.mass.tail_sum(n + 1)
        if tail.infinite:
            return POS_INF
        bound = abs(coef) * row.copy_scale(n + 1) * row.mass_factor * float(tail.value)
        if bound <= 1e-13 * max(1.0, abs(total)):
            break
        n += 1
        if n - row.n_start > 100000:
            raise UnknownSeriesError("row moment correction did not certify")
    return ExtReal(float(anchor.value) * row.mass_factor + total)


# ---------------------------------------------------------------------------
# public operations


from functools import lru_cache


@lru_cache(maxsize=16384)
def measure_of(mu: MeasureSpec, h: RealSet) -> ExtReal:
    """mu(H) >= 0; +inf when an improper term or series diverges."""
    if h.is_empty:
        return ExtReal(Fraction(0))
    if mu.kind == "density":
        _check_support(mu, h)
        return _density_measure(mu, h)
    s = mu.s if mu.s is not None else effective_dimension(h)
    return s_measure_of(s, h)


@lru_cache(maxsize=16384)
def moment_of(mu: MeasureSpec, h: RealSet) -> MeanValue:
    """integral of x over H against mu, as a MeanValue (Divergent possible)."""
    if h.is_empty:
        return MeanValue.finite(0)
    if mu.kind == "density":
        _check_support(mu, h)
        return _density_moment(mu, h)
    s = mu.s if mu.s is not None else effective_dimension(h)
    return s_moment_of(s, h)


def ifs_invariant_stats(comp: FractalPart) -> Tuple[float, float, float]:
    """(dimension, mass, mean) of one placed IFS component."""
    return comp.s, comp.mass(), comp.mean()
