"""The catalog of generalized means as uniform evaluators RealSet -> MeanValue.

Every mean is wrapped in a :class:`Mean` carrying a name, capability flags
and (when known) structural facts like monotonicity that downstream limit
machinery may exploit.  Evaluators are pure functions of the canonical set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence

from .extreal import ExtReal, NEG_INF, POS_INF
from .meanvalue import MeanValue
from .measures import (
    HARMONIC,
    LEBESGUE,
    MeasureDomainError,
    MeasureSpec,
    effective_dimension,
    measure_of,
    measure_by_name,
    moment_of,
    s_measure_of,
    s_moment_of,
)
from .seqform import SeqForm
from .sets import (
    Interval,
    RealSet,
    SetDomainError,
    UnsupportedClipError,
    clip,
    intersects_window,
    iv,
    next_gap_inf,
    reciprocal,
)


@dataclass(frozen=True)
class Mean:
    """A named generalized mean with capability flags."""

    name: str
    evaluate: Callable[[RealSet], MeanValue]
    defined_on_unbounded: bool = False
    requires_positive_support: bool = False
    requires_s_set: bool = False
    monotone: bool = False
    shift_invariant: bool = False
    symmetric: bool = False
    measure: Optional[MeasureSpec] = None  # set for measure-average means

    def __call__(self, h: RealSet) -> MeanValue:
        if h.is_empty:
            return MeanValue.undefined("empty set")
        return self.evaluate(h)

    def domain(self, h: RealSet) -> bool:
        return self(h).is_defined or self(h).kind == "divergent"


# ---------------------------------------------------------------------------
# measure means


def mmu_eval(mu: MeasureSpec, h: RealSet) -> MeanValue:
    """moment/measure when 0 < mu(H) < +inf, else Undefined."""
    if h.is_empty:
        return MeanValue.undefined("empty set")
    try:
        mass = measure_of(mu, h)
    except MeasureDomainError as exc:
        return MeanValue.undefined(str(exc))
    if mass.is_pos_inf:
        return MeanValue.undefined("mu(H) = +inf")
    m = mass.finite
    if m == 0:
        return MeanValue.undefined("mu(H) = 0")
    mom = moment_of(mu, h)
    if mom.kind == "divergent":
        return MeanValue.divergent("moment diverges on both sides")
    if mom.kind == "+inf":
        return MeanValue.plus_inf()
    if mom.kind == "-inf":
        return MeanValue.minus_inf()
    val = mom.value
    if isinstance(val, Fraction) and isinstance(m, Fraction):
        return MeanValue.finite(val / m)
    return MeanValue.finite(float(val) / float(m))


def avg_eval(h: RealSet, s: Optional[float] = None) -> MeanValue:
    """Avg (s from the set's own dimension) or Avg^s for a fixed s.

    With a fixed s the set must be an s-set built of components sharing that
    dimension; mixing dimensions is Undefined there, while plain Avg lets the
    top-dimensional part carry the whole mean.
    """
    if h.is_empty:
        return MeanValue.undefined("empty set")
    if s is None:
        s_eff = effective_dimension(h)
    else:
        s_eff = s
        from .measures import component_dimension

        dims = {round(component_dimension(c), 9) for c in h.components()}
        if len(dims) > 1:
            return MeanValue.undefined("components of mixed dimension: not an s-set")
        if dims and abs(next(iter(dims)) - s) > 1e-9:
            return MeanValue.undefined("set dimension differs from requested s")
    mass = s_measure_of(s_eff, h)
    if mass.is_pos_inf:
        return MeanValue.undefined("mu^s(H) = +inf")
    m = mass.finite
    if m == 0:
        return MeanValue.undefined("mu^s(H) = 0")
    mom = s_moment_of(s_eff, h)
    if mom.kind == "divergent":
        return MeanValue.divergent("moment diverges on both sides")
    if mom.kind == "+inf":
        return MeanValue.plus_inf()
    if mom.kind == "-inf":
        return MeanValue.minus_inf()
    val = mom.value
    if isinstance(val, Fraction) and isinstance(m, Fraction):
        return MeanValue.finite(val / m)
    return MeanValue.finite(float(val) / float(m))


# ---------------------------------------------------------------------------
# order/topology means


def mlis_eval(h: RealSet) -> MeanValue:
    """(liminf H + limsup H)/2 on bounded sets with accumulation points."""
    if h.is_empty:
        return MeanValue.undefined("empty set")
    b = h.bounds()
    if not (b.inf.is_finite and b.sup.is_finite):
        return MeanValue.undefined("unbounded set; use the extension")
    if b.liminf is None:
        return MeanValue.undefined("no accumulation points")
    return MeanValue.finite((b.liminf.finite + b.limsup.finite) / 2)


def midpoint_eval(h: RealSet) -> MeanValue:
    """(inf H + sup H)/2 on bounded sets."""
    if h.is_empty:
        return MeanValue.undefined("empty set")
    b = h.bounds()
    if not (b.inf.is_finite and b.sup.is_finite):
        return MeanValue.undefined("unbounded set")
    return MeanValue.finite((b.inf.finite + b.sup.finite) / 2)


def ordinal_gap_mean(h: RealSet, cap: int = 10**4) -> MeanValue:
    """Iterated gap-infimum mean on subsets of [0, +inf).

    Start at inf H; each successor step jumps to the infimum of the part of
    the complement at or above the current value; a stalled successor step
    triggers a limit pass (supremum of the values so far).  Stops when a
    limit pass plus a successor step produce no movement.
    """
    if h.is_empty:
        return MeanValue.undefined("empty set")
    b = h.bounds()
    if b.inf < ExtReal(0):
        return MeanValue.undefined("set must lie in [0, +inf)")
    current = b.inf
    if not current.is_finite:
        return MeanValue.undefined("empty or ill-bounded set")
    values = [current]
    for _ in range(cap):
        nxt = next_gap_inf(h, current.finite)
        if nxt is None:
            nxt = current  # complement above is empty: stay
        if nxt == current:
            # limit pass: sup of prior values is the current maximum
            limit_val = max(values)
            after = next_gap_inf(h, limit_val.finite)
            if after is None or after == limit_val:
                return MeanValue.finite(limit_val.finite)
            current = after
        else:
            current = nxt
        values.append(current)
    return MeanValue.finite(current.finite, note="unconverged at iteration cap")


def harmonic_hit_mean(h: RealSet, tol: float = 1e-10) -> MeanValue:
    """inf H + sum over i>=1 of [H meets [i, i+1)] / i, for H in [1, +inf).

    Divergence of the hit series (hits of positive lower density) yields
    PlusInf; geometric/superlinear hit patterns converge and are summed with
    a tail bound below ``tol``.
    """
    if h.is_empty:
        return MeanValue.undefined("empty set")
    b = h.bounds()
    if b.inf < ExtReal(1):
        return MeanValue.undefined("set must lie in [1, +inf)")
    if b.sup.is_finite:
        return MeanValue.undefined("set must be unbounded")
    # unbounded intervals hit every index eventually: divergent
    for itv in h.intervals:
        if itv.hi.is_pos_inf:
            return MeanValue.plus_inf("harmonic hit series diverges")
    # families/rows with sublinear-growth positions hit ~1/n of the indices
    position_rules = []
    for fam in h.families:
        if fam.n_end is not None:
            continue
        span_hi = fam.target
        if span_hi is not None and not span_hi.is_pos_inf:
            continue
        forms = fam.forms()
        if forms is None:
            return MeanValue.undefined("cannot classify hit density for this family")
        position_rules.append(forms[0])
    position_rules.extend(row.pos for row in h.rows)
    for bform in position_rules:
        rho, k = max(bform.terms.keys())  # dominant growth
        if rho == 1 and k <= 1:
            return MeanValue.plus_inf("harmonic hit series diverges")
    cutoff = 4096
    total = Fraction(0)
    for i in range(1, cutoff):
        if intersects_window(h, Fraction(i), Fraction(i + 1)):
            total += Fraction(1, i)
    if h.rows:
        # superlinear rows survive the divergence test but their hit tail
        # (copies may straddle index boundaries) is not certified
        return MeanValue.undefined("hit tail for IFS rows is not certified")
    tail_value = 0.0
    tail_err = 0.0
    tail_exact = Fraction(0)
    for fam in h.families:
        part = _family_hit_tail(fam, cutoff)
        if isinstance(part, MeanValue):
            return part
        exact, val, err = part
        tail_exact += exact
        tail_value += val
        tail_err += err
    if tail_err > tol:
        return MeanValue.undefined("hit tail bound exceeds tolerance")
    if tail_value == 0.0 and tail_err == 0.0 and isinstance(b.inf.finite, Fraction):
        return MeanValue.finite(b.inf.finite + total + tail_exact)
    result = float(b.inf.finite) + float(total) + float(tail_exact) + tail_value
    return MeanValue.finite(result)


def _family_hit_tail(fam, cutoff: int):
    """Hit-series contribution of a family's blocks at or beyond the cutoff.

    Returns (exact, value, err_bound) or a terminal MeanValue.  Hit indices
    below the cutoff were already counted by exact window tests.
    """
    span_hi = fam.target if fam.n_end is None else ExtReal(fam.block(fam.n_end)[1])
    if span_hi is not None and span_hi.is_finite and span_hi < ExtReal(cutoff):
        return Fraction(0), 0.0, 0.0
    if not fam.increasing:
        # decreasing families accumulate at a finite point; handled above
        return Fraction(0), 0.0, 0.0
    n = fam.n_start
    guard = 0
    while fam.block(n)[1] < cutoff:
        n += 1
        guard += 1
        if guard > 10**6 or (fam.n_end is not None and n > fam.n_end):
            return Fraction(0), 0.0, 0.0
    exact = Fraction(0)
    budget = 4096
    while budget > 0:
        if fam.n_end is not None and n > fam.n_end:
            return exact, 0.0, 0.0
        lo, hi = fam.block(n)
        lo_i = max(math.floor(lo), cutoff)
        hi_i = math.floor(hi)
        if hi_i - lo_i > 10**6:
            return MeanValue.plus_inf("a single block hits a harmonic stretch")
        for i in range(lo_i, hi_i + 1):
            if i >= cutoff and i >= lo - 1:
                exact += Fraction(1, i)
        n += 1
        budget -= 1
    # symbolic continuation: degenerate integer-position blocks sum to 1/b_n
    forms = fam.forms()
    if forms is not None and fam.degenerate:
        bform = forms[0]
        if all(bform.evaluate(m).denominator == 1 for m in range(n, n + 32)):
            rec = bform.reciprocal_term()
            if rec is not None:
                rest = rec.tail_sum(n)
                if rest.infinite:
                    return MeanValue.plus_inf("harmonic hit series diverges")
                if rest.exact:
                    return exact + rest.value, 0.0, 0.0
                return exact, float(rest.value), rest.err
    # generic bound: each block hits <= c_n + 2 indices, all >= b_n / 2
    if forms is not None:
        bform, cform = forms
        rec = bform.reciprocal_term()
        if rec is not None:
            bound_form = (cform + SeqForm.const(2)) * rec * 2
            rest = bound_form.tail_sum(n)
            if rest.infinite:
                return MeanValue.plus_inf("harmonic hit series diverges")
            bound = float(rest.value) + rest.err
            return exact, 0.0, bound
    return MeanValue.undefined("cannot certify the family's hit tail")


def anchor_mean(h: RealSet, anchors: SeqForm, n_start: int = 1) -> MeanValue:
    """sup of the anchor values lying in H (PlusInf if infinitely many),
    else inf H; H must sit inside [0, +inf)."""
    if h.is_empty:
        return MeanValue.undefined("empty set")
    b = h.bounds()
    if b.inf < ExtReal(0):
        return MeanValue.undefined("set must lie in [0, +inf)")
    # rays make infinitely many anchors members, exactly
    for itv in h.intervals:
        if itv.hi.is_pos_inf:
            return MeanValue.plus_inf("anchors are eventually all members")
    def probe_hits() -> int:
        return sum(1 for j in range(10, 41) if h.contains(anchors.evaluate(1 << j)))

    best: Optional[Fraction] = None
    n = n_start
    checked = 0
    all_hit = True
    while True:
        a = anchors.evaluate(n)
        if b.sup.is_finite and a > b.sup.finite:
            break
        hit = h.contains(a)
        all_hit = all_hit and hit
        if hit:
            best = a
        n += 1
        checked += 1
        if checked == 256 and all_hit and not b.sup.is_finite and probe_hits() == 31:
            return MeanValue.plus_inf("anchor hits persist at all sampled scales")
        if checked > 4096:
            if probe_hits() >= 29:
                return MeanValue.plus_inf("anchor hits persist at all sampled scales")
            return MeanValue.undefined("anchor search budget exceeded")
    if best is None:
        return MeanValue.from_extreal(b.inf)
    return MeanValue.finite(best)


# ---------------------------------------------------------------------------
# combinators


def simple_extension(base: Mean) -> Mean:
    """PlusInf on every unbounded set, the base mean otherwise."""

    def run(h: RealSet) -> MeanValue:
        if not h.is_bounded:
            return MeanValue.plus_inf()
        return base(h)

    return Mean(
        name=f"simple:{base.name}",
        evaluate=run,
        defined_on_unbounded=True,
        monotone=False,
    )


def reciprocal_extension(base: Mean, h: RealSet) -> MeanValue:
    """1/base(1/H) on upward-unbounded positive sets; base itself on bounded."""
    if h.is_empty:
        return MeanValue.undefined("empty set")
    b = h.bounds()
    if b.inf < ExtReal(0) or (b.inf == ExtReal(0) and h.contains(Fraction(0))):
        return MeanValue.undefined("set must be strictly positive")
    if b.sup.is_finite:
        return base(h)
    try:
        inv = reciprocal(h)
    except SetDomainError as exc:
        return MeanValue.undefined(str(exc))
    val = base(inv)
    if not val.is_defined:
        return val
    if val.kind == "finite":
        if val.value == 0:
            return MeanValue.plus_inf()
        v = val.value
        return MeanValue.finite(1 / v if isinstance(v, Fraction) else 1.0 / v)
    # base(1/H) = +inf cannot happen for sets inside (0, 1/inf]; be safe
    return MeanValue.undefined("reciprocal mean escaped its range")


def reciprocal_extension_mean(base: Mean) -> Mean:
    return Mean(
        name=f"recipext:{base.name}",
        evaluate=lambda h: reciprocal_extension(base, h),
        defined_on_unbounded=True,
        requires_positive_support=True,
    )


def blend_mean(base: Mean, toward: str) -> Mean:
    """Average of a base mean with inf or sup; orders pairs of means for
    dominance tests while staying internal."""

    def run(h: RealSet) -> MeanValue:
        v = base(h)
        if not v.is_defined:
            return v
        b = h.bounds()
        edge = b.inf if toward == "inf" else b.sup
        ve = v.as_extreal()
        try:
            total = ve + edge
        except ArithmeticError:
            return MeanValue.divergent("opposite infinities in blend")
        return MeanValue.from_extreal(total / ExtReal(2))

    return Mean(
        name=f"{toward}blend:{base.name}",
        evaluate=run,
        defined_on_unbounded=base.defined_on_unbounded,
        monotone=False,
    )


def mean_set_hf(h: RealSet) -> Interval:
    """The median interval: all x with lambda(H below x) = lambda(H above x).

    Requires 0 < lambda(H) < +inf.  Always a closed finite interval, possibly
    degenerate; endpoints are exact rationals found by walking the
    piecewise-linear cumulative mass.
    """
    if h.is_empty:
        raise SetDomainError("median of the empty set")
    total = measure_of(LEBESGUE, h)
    if total.is_pos_inf or total.finite == 0:
        raise SetDomainError("median needs 0 < lambda(H) < +inf")
    half = total.finite / 2
    if not isinstance(half, Fraction):
        raise SetDomainError("median needs exact rational mass")

    def cum(x: Fraction) -> Fraction:
        part = clip(h, NEG_INF, x)
        if part.is_empty:
            return Fraction(0)
        v = measure_of(LEBESGUE, part).finite
        return v

    # bracket the half-mass point on component breakpoints
    breaks = _lebesgue_breakpoints(h)
    lo_end: Optional[Fraction] = None
    hi_end: Optional[Fraction] = None
    prev_x, prev_c = breaks[0], cum(breaks[0])
    for x in breaks[1:]:
        c = cum(x)
        if prev_c <= half <= c:
            # mass grows linearly inside a component piece
            if c == prev_c:
                pass
            else:
                t = prev_x + (half - prev_c) / (c - prev_c) * (x - prev_x)
                if lo_end is None:
                    lo_end = t
                hi_end = t
        prev_x, prev_c = x, c
    if lo_end is None:
        raise SetDomainError("median bracketing failed")
    # widen across mass-free gaps: all x with cum(x) == half qualify
    lo, hi = lo_end, hi_end
    grow = _flat_region(h, lo, hi, half, cum)
    return iv(grow[0], grow[1])


def _lebesgue_breakpoints(h: RealSet) -> list:
    pts = set()
    for itv in h.intervals:
        for e in (itv.lo, itv.hi):
            if e.is_finite:
                pts.add(e.finite)
    pts.update(h.points)
    for fam in h.families:
        last = fam.n_start + 64
        if fam.n_end is not None:
            last = min(last, fam.n_end)
        for n in range(fam.n_start, last + 1):
            lo, hi = fam.block(n)
            pts.add(lo)
            pts.add(hi)
    for fr in h.fractals:
        lo, hi = fr.hull()
        pts.add(lo.finite)
        pts.add(hi.finite)
    if not pts:
        raise SetDomainError("no finite breakpoints")
    out = sorted(pts)
    return [out[0] - 1] + out + [out[-1] + 1]


def _flat_region(h, lo, hi, half, cum):
    """Extend [lo, hi] over the zero-density region keeping cum == half."""
    # walk outward along breakpoints while the cumulative mass stays at half
    breaks = _lebesgue_breakpoints(h)
    lo_out, hi_out = lo, hi
    for x in sorted((b for b in breaks if b > hi)):
        if cum(x) == half:
            hi_out = x
        else:
            break
    for x in sorted((b for b in breaks if b < lo), reverse=True):
        # cum just below lo: mass strictly below x must still equal half
        if cum(x) == half:
            lo_out = x
        else:
            break
    return lo_out, hi_out


# ---------------------------------------------------------------------------
# registry


def _mmu_mean(name: str, mu: MeasureSpec, positive: bool) -> Mean:
    return Mean(
        name=name,
        evaluate=lambda h: mmu_eval(mu, h),
        defined_on_unbounded=True,
        requires_positive_support=positive,
        monotone=True,
        shift_invariant=(mu.name == "lebesgue"),
        symmetric=(mu.name == "lebesgue"),
        measure=mu,
    )


def _bounded_restriction(base: Mean) -> Mean:
    def run(h: RealSet) -> MeanValue:
        if not h.is_bounded:
            return MeanValue.undefined("restricted to bounded sets")
        return base(h)

    return Mean(
        name=f"bounded:{base.name}",
        evaluate=run,
        defined_on_unbounded=False,
        requires_positive_support=base.requires_positive_support,
        monotone=base.monotone,
        shift_invariant=base.shift_invariant,
        symmetric=base.symmetric,
        measure=base.measure,
    )


MEAN_BUILDERS: Dict[str, Callable[[], Mean]] = {}


def _register(name: str, builder: Callable[[], Mean]) -> None:
    MEAN_BUILDERS[name] = builder


_register("mmu:lebesgue", lambda: _mmu_mean("mmu:lebesgue", LEBESGUE, False))
_register("mmu:harmonic", lambda: _mmu_mean("mmu:harmonic", HARMONIC, True))
_register("avg1", lambda: _mmu_mean("avg1", LEBESGUE, False))
_register(
    "avg",
    lambda: Mean(
        name="avg",
        evaluate=lambda h: avg_eval(h),
        defined_on_unbounded=True,
        requires_s_set=True,
        monotone=False,
    ),
)
_register(
    "mlis",
    lambda: Mean(name="mlis", evaluate=mlis_eval, defined_on_unbounded=False),
)
_register(
    "midpoint",
    lambda: Mean(
        name="midpoint",
        evaluate=midpoint_eval,
        defined_on_unbounded=False,
        monotone=True,
        shift_invariant=True,
        symmetric=True,
    ),
)
_register(
    "gapinf",
    lambda: Mean(
        name="gapinf",
        evaluate=lambda h: ordinal_gap_mean(h),
        defined_on_unbounded=True,
    ),
)
_register(
    "hitsum",
    lambda: Mean(
        name="hitsum",
        evaluate=lambda h: harmonic_hit_mean(h),
        defined_on_unbounded=True,
        requires_positive_support=True,
    ),
)
_register(
    "anchor",
    lambda: Mean(
        name="anchor",
        evaluate=lambda h: anchor_mean(h, SeqForm.var()),
        defined_on_unbounded=True,
    ),
)


def get_mean(name: str) -> Mean:
    """Resolve a mean by registry name, including the combinator prefixes

    ``simple:<base>``, ``recipext:<base>``, ``bounded:<base>``,
    ``infblend:<base>``, ``supblend:<base>`` and ``avg:s=<float>``.
    """
    if name in MEAN_BUILDERS:
        return MEAN_BUILDERS[name]()
    if name.startswith("simple:"):
        return simple_extension(get_mean(name.split(":", 1)[1]))
    if name.startswith("recipext:"):
        return reciprocal_extension_mean(get_mean(name.split(":", 1)[1]))
    if name.startswith("bounded:"):
        return _bounded_restriction(get_mean(name.split(":", 1)[1]))
    if name.startswith("infblend:"):
        return blend_mean(get_mean(name.split(":", 1)[1]), "inf")
    if name.startswith("supblend:"):
        return blend_mean(get_mean(name.split(":", 1)[1]), "sup")
    if name.startswith("avg:s="):
        s = float(name.split("=", 1)[1])
        return Mean(
            name=name,
            evaluate=lambda h: avg_eval(h, s),
            defined_on_unbounded=True,
            requires_s_set=True,
        )
    raise KeyError(f"unknown mean {name!r}")


def known_mean_names() -> Sequence[str]:
    return sorted(MEAN_BUILDERS) + [
        "simple:<base>",
        "recipext:<base>",
        "bounded:<base>",
        "infblend:<base>",
        "supblend:<base>",
        "avg:s=<float>",
    ]
