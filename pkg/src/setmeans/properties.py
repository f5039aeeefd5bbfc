"""Executable checkers for the mean axioms, with witness-carrying verdicts.

Every checker samples concrete cases (catalog sets, generated pairs/triples,
grid points) and returns a three-valued verdict: ``holds-on-catalog`` (no
violation found on the cases run), ``counterexample`` (a re-checkable
witness violates the property), or ``inconclusive`` (the sampling budget ran
out without separating the two).  Universal statements are never claimed;
verdicts are always relative to the cases actually evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .extreal import ExtReal, NEG_INF, POS_INF
from .meanvalue import MeanValue
from .means import Mean
from .sets import RealSet, affine, clip, union

HOLDS = "holds-on-catalog"
COUNTEREXAMPLE = "counterexample"
INCONCLUSIVE = "inconclusive"


@dataclass
class PropertyReport:
    prop: str
    mean: str
    verdict: str
    witnesses: List[dict] = field(default_factory=list)
    samples: int = 0
    notes: str = ""

    def to_text(self) -> str:
        head = f"{self.prop} [{self.mean}]: {self.verdict} ({self.samples} cases)"
        lines = [head]
        if self.notes:
            lines.append(f"  note: {self.notes}")
        for w in self.witnesses[:4]:
            parts = ", ".join(f"{k}={_short(v)}" for k, v in w.items() if k != "recheck")
            lines.append(f"  witness: {parts}")
        return "\n".join(lines)

    def to_record(self) -> dict:
        return {
            "property": self.prop,
            "mean": self.mean,
            "verdict": self.verdict,
            "samples": self.samples,
            "notes": self.notes,
            "witnesses": [
                {k: _short(v) for k, v in w.items() if k != "recheck"}
                for w in self.witnesses
            ],
        }


def _short(v) -> str:
    s = repr(v) if not isinstance(v, str) else v
    return s if len(s) <= 120 else s[:117] + "..."


def _cmp_le(a: ExtReal, b: ExtReal, tol: float) -> bool:
    """a <= b up to tol on the finite parts."""
    if a <= b:
        return True
    if a.is_finite and b.is_finite:
        return float(a.finite) <= float(b.finite) + tol
    return False


# ---------------------------------------------------------------------------
# internality


def check_internality(
    mean: Mean,
    level: str,
    catalog: Dict[str, RealSet],
    tol: float = 1e-9,
) -> PropertyReport:
    """Internality at level 'plain', 'strong', or 'i-strong'."""
    report = PropertyReport(prop=f"internality:{level}", mean=mean.name, verdict=HOLDS)
    for name, h in catalog.items():
        v = mean(h)
        if not v.is_defined:
            continue
        report.samples += 1
        b = h.bounds()
        if level == "plain":
            lo, hi = b.inf, b.sup
        elif level == "strong":
            if b.liminf is None:
                continue
            lo, hi = b.liminf, b.limsup
        elif level == "i-strong":
            bounds = _acc_bounds_excluding_infinite(h)
            if bounds is None:
                continue
            lo, hi = bounds
        else:
            raise ValueError(f"unknown internality level {level!r}")
        val = v.as_extreal()
        if not (_cmp_le(lo, val, tol) and _cmp_le(val, hi, tol)):
            report.verdict = COUNTEREXAMPLE
            report.witnesses.append(
                {"set": name, "value": v.pretty(), "lo": lo, "hi": hi, "H": h}
            )
    return report


def _acc_bounds_excluding_infinite(h: RealSet):
    """(inf(H' - {-inf}), sup(H' - {+inf})), or None when H' is empty.

    A span that is the single point -inf (a family escaping downward with no
    thick blocks) contributes nothing after the exclusion; a span reaching
    -inf with finite extent contains arbitrarily low finite accumulation
    points and keeps the inf at -inf.  Empty exclusions give the usual
    inf/sup of the empty set (+inf / -inf), which makes violations loud.
    """
    spans = h.acc_spans()
    if not spans:
        return None
    los: List[ExtReal] = []
    his: List[ExtReal] = []
    for lo, hi in spans:
        if not (lo == NEG_INF and hi == NEG_INF):
            los.append(ext_cap_lo(lo, hi))
        if not (lo == POS_INF and hi == POS_INF):
            his.append(ext_cap_hi(lo, hi))
    lo = min(los) if los else POS_INF
    hi = max(his) if his else NEG_INF
    return lo, hi


def ext_cap_lo(lo: ExtReal, hi: ExtReal) -> ExtReal:
    # lowest element of the span after removing a bare -inf endpoint
    return lo


def ext_cap_hi(lo: ExtReal, hi: ExtReal) -> ExtReal:
    return hi


# ---------------------------------------------------------------------------
# monotonicity


def check_monotonicity(
    mean: Mean,
    variant: str,
    cases: Iterable,
    tol: float = 1e-9,
) -> PropertyReport:
    """variant in {'monotone', 'base', 'disjoint', 'strong-base', 'clip-increasing'}."""
    report = PropertyReport(prop=f"monotone:{variant}", mean=mean.name, verdict=HOLDS)
    for case in cases:
        if variant == "monotone":
            h1, h2 = case
            v1, v2 = mean(h1), mean(h2)
            vu = mean(union(h1, h2))
            if not (v1.is_defined and v2.is_defined and vu.is_defined):
                continue
            report.samples += 1
            if not (
                _cmp_le(v1.as_extreal(), vu.as_extreal(), tol)
                and _cmp_le(vu.as_extreal(), v2.as_extreal(), tol)
            ):
                report.verdict = COUNTEREXAMPLE
                report.witnesses.append(
                    {"H1": h1, "H2": h2, "values": (v1.pretty(), vu.pretty(), v2.pretty())}
                )
        elif variant in ("base", "disjoint"):
            h1, h2 = case
            v1, v2 = mean(h1), mean(h2)
            vu = mean(union(h1, h2))
            if not (v1.is_defined and v2.is_defined and vu.is_defined):
                continue
            report.samples += 1
            lo = min(v1.as_extreal(), v2.as_extreal())
            hi = max(v1.as_extreal(), v2.as_extreal())
            if not (_cmp_le(lo, vu.as_extreal(), tol) and _cmp_le(vu.as_extreal(), hi, tol)):
                report.verdict = COUNTEREXAMPLE
                report.witnesses.append(
                    {"H1": h1, "H2": h2, "values": (v1.pretty(), vu.pretty(), v2.pretty())}
                )
        elif variant == "strong-base":
            h1, h2, kset = case
            out = _strong_base_case(mean, h1, h2, kset, tol)
            if out is None:
                continue
            report.samples += 1
            ok, info = out
            if ok is None:
                if report.verdict == HOLDS:
                    report.verdict = INCONCLUSIVE
                report.witnesses.append(info)
            elif not ok:
                report.verdict = COUNTEREXAMPLE
                report.witnesses.append(info)
        elif variant == "clip-increasing":
            h, xs = case
            vals = []
            for x in xs:
                piece = clip(h, x, POS_INF)
                if piece.is_empty:
                    continue
                v = mean(piece)
                if v.is_defined:
                    vals.append((x, v))
            report.samples += len(vals)
            for (x1, a), (x2, b) in zip(vals, vals[1:]):
                if not _cmp_le(a.as_extreal(), b.as_extreal(), tol):
                    report.verdict = COUNTEREXAMPLE
                    report.witnesses.append(
                        {"H": h, "x1": x1, "x2": x2, "values": (a.pretty(), b.pretty())}
                    )
        else:
            raise ValueError(f"unknown monotonicity variant {variant!r}")
    return report


def _strong_base_case(mean: Mean, h1: RealSet, h2: RealSet, kset: RealSet, tol: float):
    vals = {}
    for tag, s in (
        ("K1", h1),
        ("K2", h2),
        ("K", kset),
        ("K1K", union(h1, kset)),
        ("K2K", union(h2, kset)),
    ):
        v = mean(s)
        if not v.is_finite:
            return None
        vals[tag] = float(v.value)

    def weight(vh, vk, vu):
        if abs(vh - vk) <= tol:
            if abs(vu - vh) <= tol:
                return 0.0  # the tie rule: c = 0
            return None  # degenerate: equal parts, moved union
        return (vu - vk) / (vh - vk)

    c1 = weight(vals["K1"], vals["K"], vals["K1K"])
    c2 = weight(vals["K2"], vals["K"], vals["K2K"])
    info = {"H1": h1, "H2": h2, "K": kset, "c": c1, "c_prime": c2}
    if c1 is None or c2 is None:
        return None, info
    return c1 <= c2 + 1e-7, info


# ---------------------------------------------------------------------------
# continuity


def _compact_grid(n: int) -> List[Fraction]:
    """Rational grid on [-1, 1] mapped through t -> t/(1-|t|) to cover R."""
    return [Fraction(2 * i - n, n) for i in range(n + 1)]


def _t_to_x(t: Fraction) -> ExtReal:
    if t <= -1:
        return NEG_INF
    if t >= 1:
        return POS_INF
    return ExtReal(t / (1 - abs(t)))


def _angle(v: Optional[MeanValue]) -> Optional[float]:
    if v is None or not v.is_defined:
        return None
    if v.kind == "+inf":
        return math.pi / 2
    if v.kind == "-inf":
        return -math.pi / 2
    return math.atan(float(v.value))


def check_continuity(
    mean: Mean,
    variant: str,
    h: RealSet,
    other=None,
    grid_n: int = 64,
    tol: float = 1e-6,
    refine_rounds: int = 20,
) -> PropertyReport:
    """variant in {'slice', 'i-slice', 'interval-continuous'}.

    Slice functions are sampled on a compactified rational grid; a jump is
    flagged only when refining the straddling cell fails to shrink the gap.
    Verdicts are per the arctan metric, i.e. continuity on the extended
    line, so escaping to an infinity continuously is not a jump.
    """
    report = PropertyReport(prop=f"continuity:{variant}", mean=mean.name, verdict=HOLDS)

    def slice_fns() -> List[Tuple[str, Callable[[ExtReal], Optional[MeanValue]]]]:
        if variant == "slice":
            y = ExtReal.of(other) if not isinstance(other, ExtReal) else other

            def f(x: ExtReal) -> Optional[MeanValue]:
                if x > y:
                    return None
                piece = clip(h, x, y)
                return None if piece.is_empty else mean(piece)

            return [("f_y", f)]
        if variant == "i-slice":

            def f_lo(x: ExtReal) -> Optional[MeanValue]:
                piece = clip(h, NEG_INF, x)
                return None if piece.is_empty else mean(piece)

            def f_hi(x: ExtReal) -> Optional[MeanValue]:
                piece = clip(h, x, POS_INF)
                return None if piece.is_empty else mean(piece)

            return [("x-", f_lo), ("x+", f_hi)]
        if variant == "interval-continuous":

            def f_tr(x: ExtReal) -> Optional[MeanValue]:
                if not x.is_finite:
                    return None
                t = x.finite
                return mean(union(h, affine(other, 1, t)))

            return [("translate", f_tr)]
        raise ValueError(f"unknown continuity variant {variant!r}")

    for tag, fn in slice_fns():
        ts = _compact_grid(grid_n)
        samples: List[Tuple[Fraction, Optional[float]]] = []
        for t in ts:
            x = _t_to_x(t)
            v = fn(x)
            samples.append((t, _angle(v)))
            report.samples += 1
        # inspect adjacent defined samples
        for (t1, a1), (t2, a2) in zip(samples, samples[1:]):
            if a1 is None or a2 is None:
                continue
            gap = abs(a2 - a1)
            if gap <= tol:
                continue
            verdict, witness = _refine_jump(fn, t1, t2, a1, a2, tol, refine_rounds)
            if verdict == COUNTEREXAMPLE:
                report.verdict = COUNTEREXAMPLE
                witness["slice"] = tag
                witness["H"] = h
                report.witnesses.append(witness)
            elif verdict == INCONCLUSIVE and report.verdict == HOLDS:
                report.verdict = INCONCLUSIVE
                witness["slice"] = tag
                report.witnesses.append(witness)
    return report


def _refine_jump(fn, t1: Fraction, t2: Fraction, a1: float, a2: float, tol: float, rounds: int):
    """Bisect the straddling cell; a persistent gap is a jump."""
    gap0 = abs(a2 - a1)
    for _ in range(rounds):
        tm = (t1 + t2) / 2
        am = _angle(fn(_t_to_x(tm)))
        if am is None:
            # domain boundary inside the cell; not a jump of the function
            return HOLDS, {}
        if abs(am - a1) >= abs(am - a2):
            t2, a2 = tm, am
        else:
            t1, a1 = tm, am
        gap = abs(a2 - a1)
        if gap <= tol:
            return HOLDS, {}
    witness = {
        "x_left": _t_to_x(t1),
        "x_right": _t_to_x(t2),
        "angles": (a1, a2),
        "gap": abs(a2 - a1),
    }
    if abs(a2 - a1) >= 0.5 * gap0:
        return COUNTEREXAMPLE, witness
    return INCONCLUSIVE, witness


# ---------------------------------------------------------------------------
# infinite behavior


def _doubling_xs(k_max: int = 40) -> List[Fraction]:
    return [Fraction(2) ** k for k in range(k_max + 1)]


def check_infinite_behavior(
    mean: Mean,
    variant: str,
    cases: Iterable,
    tol: float = 1e-8,
    big: float = 1e9,
) -> PropertyReport:
    """variant in {'interval-infinite', 'bounded-small', 'finite',
    'subset-finite', 'bounded-finite', 'limit-finite'}."""
    report = PropertyReport(prop=variant, mean=mean.name, verdict=HOLDS)
    for case in cases:
        if variant == "interval-infinite":
            h, ival = case
            out = _interval_infinite_case(mean, h, ival, tol, big)
            report.samples += 1
            if out is not None:
                verdict, witness = out
                if verdict != HOLDS:
                    report.verdict = verdict
                    report.witnesses.append(witness)
        elif variant == "bounded-small":
            h, kset, h_value = case
            vu = mean(union(h, kset))
            if not vu.is_defined:
                continue
            report.samples += 1
            if vu.kind != h_value.kind:
                report.verdict = COUNTEREXAMPLE
                report.witnesses.append(
                    {"H": h, "K": kset, "K(H)": h_value.pretty(), "K(HuK)": vu.pretty()}
                )
        elif variant == "finite":
            h = case
            v = mean(h)
            if not v.is_defined:
                continue
            report.samples += 1
            if v.is_infinite:
                report.verdict = COUNTEREXAMPLE
                report.witnesses.append({"H": h, "value": v.pretty()})
        elif variant == "subset-finite":
            h, sub = case
            vh, vs = mean(h), mean(sub)
            if not (vh.is_finite and vs.is_defined):
                continue
            report.samples += 1
            if vs.is_infinite:
                report.verdict = COUNTEREXAMPLE
                report.witnesses.append({"H": h, "K": sub, "K(K)": vs.pretty()})
        elif variant == "bounded-finite":
            h, kset = case
            vh = mean(h)
            vu = mean(union(h, kset))
            if not (vh.is_finite and vu.is_defined):
                continue
            report.samples += 1
            if vu.is_infinite:
                report.verdict = COUNTEREXAMPLE
                report.witnesses.append({"H": h, "K": kset, "K(HuK)": vu.pretty()})
        elif variant == "limit-finite":
            h = case
            out = _limit_finite_case(mean, h, tol)
            if out is None:
                continue
            report.samples += 1
            verdict, witness = out
            if verdict != HOLDS:
                report.verdict = verdict
                report.witnesses.append(witness)
        else:
            raise ValueError(f"unknown infinite-behavior variant {variant!r}")
    return report


def _interval_infinite_case(mean: Mean, h: RealSet, ival: RealSet, tol: float, big: float):
    """Drive I to +inf attached to H; the mean must escape, or the finite
    limit is the counterexample witness."""
    vals: List[float] = []
    for x in _doubling_xs():
        v = mean(union(h, affine(ival, 1, x)))
        if not v.is_defined:
            continue
        f = v.as_float()
        vals.append(f)
        if f >= big:
            return None  # escaped: this direction holds
    if len(vals) >= 6 and abs(vals[-1] - vals[-2]) <= max(tol, 1e-6 * abs(vals[-1])):
        return COUNTEREXAMPLE, {"H": h, "I": ival, "limit": vals[-1], "trace": vals[-4:]}
    return INCONCLUSIVE, {"H": h, "I": ival, "trace": vals[-4:]}


def _limit_finite_case(mean: Mean, h: RealSet, tol: float):
    v = mean(h)
    if not v.is_finite:
        return None
    b = h.bounds()
    trace = []
    if b.sup.is_pos_inf:
        for x in _doubling_xs(30):
            piece = clip(h, x, POS_INF)
            if piece.is_empty:
                break
            vv = mean(piece)
            if not vv.is_finite:
                return COUNTEREXAMPLE, {"H": h, "x": x, "value": vv.pretty()}
            residue = float(vv.value) - piece.bounds().inf.as_float()
            trace.append(residue)
    if b.inf.is_neg_inf:
        for x in _doubling_xs(30):
            piece = clip(h, NEG_INF, -x)
            if piece.is_empty:
                break
            vv = mean(piece)
            if not vv.is_finite:
                return COUNTEREXAMPLE, {"H": h, "x": -x, "value": vv.pretty()}
            residue = float(vv.value) - piece.bounds().sup.as_float()
            trace.append(residue)
    if not trace:
        return None
    if abs(trace[-1]) <= tol:
        return HOLDS, {}
    if len(trace) >= 3 and abs(trace[-1] - trace[-2]) <= 1e-6:
        return COUNTEREXAMPLE, {"H": h, "residue_limit": trace[-1], "trace": trace[-4:]}
    return INCONCLUSIVE, {"H": h, "trace": trace[-4:]}


# ---------------------------------------------------------------------------
# invariances


def check_invariance(
    mean: Mean,
    variant: str,
    cases: Iterable,
    tol: float = 1e-9,
) -> PropertyReport:
    """variant in {'shift', 'homogeneous', 'symmetric'}."""
    report = PropertyReport(prop=f"invariance:{variant}", mean=mean.name, verdict=HOLDS)
    for case in cases:
        if variant == "shift":
            h, t = case
            v = mean(h)
            vt = mean(affine(h, 1, t))
            if not (v.is_defined and vt.is_defined):
                continue
            report.samples += 1
            want = _shift_value(v, t)
            if want is None or not vt.approx_eq(want, tol):
                report.verdict = COUNTEREXAMPLE
                report.witnesses.append(
                    {"H": h, "t": t, "K(H)": v.pretty(), "K(H+t)": vt.pretty()}
                )
        elif variant == "homogeneous":
            h, alpha = case
            v = mean(h)
            va = mean(affine(h, alpha, 0))
            if not (v.is_defined and va.is_defined):
                continue
            report.samples += 1
            want = _scale_value(v, alpha)
            if want is None or not va.approx_eq(want, tol):
                report.verdict = COUNTEREXAMPLE
                report.witnesses.append(
                    {"H": h, "alpha": alpha, "K(H)": v.pretty(), "K(aH)": va.pretty()}
                )
        elif variant == "symmetric":
            h, s = case
            if affine(h, -1, 2 * Fraction(s)) != h:
                continue  # not actually symmetric about s; skip the case
            v = mean(h)
            if not v.is_defined:
                continue
            report.samples += 1
            if not v.approx_eq(MeanValue.finite(Fraction(s)), tol):
                report.verdict = COUNTEREXAMPLE
                report.witnesses.append({"H": h, "s": s, "value": v.pretty()})
        else:
            raise ValueError(f"unknown invariance variant {variant!r}")
    return report


def _shift_value(v: MeanValue, t) -> Optional[MeanValue]:
    if v.is_finite:
        return MeanValue.finite(v.value + Fraction(t) if isinstance(v.value, Fraction) else float(v.value) + float(t))
    return v


def _scale_value(v: MeanValue, alpha) -> Optional[MeanValue]:
    alpha = Fraction(alpha)
    if v.is_finite:
        return MeanValue.finite(v.value * alpha if isinstance(v.value, Fraction) else float(v.value) * float(alpha))
    if alpha > 0:
        return v
    if v.kind == "+inf":
        return MeanValue.minus_inf()
    if v.kind == "-inf":
        return MeanValue.plus_inf()
    return v
