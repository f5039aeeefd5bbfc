"""Greedy constructions of sets with prescribed measure/mean behavior.

Each builder follows the corresponding existence proof: place intervals one
at a time, with a doubling search to bracket a workable placement and a
bisection to pin it down, while a telescoping length budget keeps the total
Lebesgue measure under the requested epsilon.  Builders return the set
together with a certificate; certificates are *re-verified from scratch*
through the measure/mean/extension modules by ``verify_certificate``, never
trusted from the builder's own bookkeeping.

Unbounded results carry a closed-form block-family continuation of the
greedy prefix (greedy placements themselves have no closed form); the
certificate covers the prefix stages exactly and the full set through the
extension operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .extension import DEFAULT_SCHEDULE, WindowSchedule, extend_mean
from .meanvalue import MeanValue
from .means import Mean
from .measures import LEBESGUE, measure_of
from .seqform import SeqForm, seq_n
from .sets import BlockFamily, RealSet, clip, interval_set, normalize, union, affine

F = Fraction


class ConstructionFailed(RuntimeError):
    def __init__(self, message: str, trace: List[str]):
        super().__init__(message)
        self.trace = trace


@dataclass
class Certificate:
    kind: str
    lam_total: Fraction
    lam_budget: Optional[Fraction]
    stage_values: List[Tuple[int, float]]
    stage_rule: str
    target: Optional[Fraction] = None
    tolerance: float = 1e-8
    notes: str = ""

    def to_lines(self) -> List[str]:
        lines = [f"construction: {self.kind}"]
        if self.lam_budget is not None:
            lines.append(f"lambda(result) = {self.lam_total} (budget {self.lam_budget})")
        else:
            lines.append(f"lambda(result) = {self.lam_total}")
        lines.append(f"stage rule: {self.stage_rule}")
        for n, v in self.stage_values:
            lines.append(f"  stage {n}: K = {v:.6g}")
        if self.target is not None:
            lines.append(f"target: {self.target} (tol {self.tolerance})")
        if self.notes:
            lines.append(f"notes: {self.notes}")
        return lines


@dataclass
class Construction:
    result: RealSet
    certificate: Certificate
    windows: Optional[List[Tuple[Fraction, Fraction]]] = None


def _eval(mean: Mean, h: RealSet) -> MeanValue:
    if mean.defined_on_unbounded or h.is_bounded:
        return mean(h)
    return extend_mean(mean, h).value


# ---------------------------------------------------------------------------
# placement search


def _place(
    mean: Mean,
    prefix: RealSet,
    length: Fraction,
    threshold: float,
    sign: int,
    trace: List[str],
) -> Optional[RealSet]:
    """An interval of the given length placed so the union's mean passes the
    threshold in the direction of ``sign``; doubling to bracket, 60 halvings
    to pin, then a dyadic rounding of the placement."""
    hull = prefix.bounds()

    def passes(x: Fraction) -> bool:
        cand = interval_set(x, x + length) if sign > 0 else interval_set(x - length, x)
        v = mean(union(prefix, cand))
        if not v.is_finite:
            return v.kind == ("+inf" if sign > 0 else "-inf")
        return float(v.value) > threshold if sign > 0 else float(v.value) < threshold

    x = (hull.sup.finite + 1) if sign > 0 else (hull.inf.finite - 1)
    lo = x
    found = None
    for _ in range(200):
        if passes(x):
            found = x
            break
        lo = x
        x = x * 2 if abs(x) >= 1 else x + sign
    if found is None:
        trace.append(f"doubling search exhausted near x ~ {float(x):.3g}")
        return None
    hi = found
    for _ in range(60):
        mid = (lo + hi) / 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    x_place = _dyadic_away_from_zero(hi, sign)
    if not passes(x_place):
        x_place = hi
    return (
        interval_set(x_place, x_place + length)
        if sign > 0
        else interval_set(x_place - length, x_place)
    )


def _dyadic_away_from_zero(x: Fraction, sign: int, bits: int = 20) -> Fraction:
    scale = F(2) ** bits
    n = math.ceil(x * scale) if sign > 0 else math.floor(x * scale)
    return F(n, 1) / scale


# ---------------------------------------------------------------------------
# thin set with infinite mean


def build_thin_infinite(mean: Mean, eps, n_max: int = 12) -> Construction:
    """A set of measure < eps whose running mean exceeds every stage index.

    The doubling search failing to push the mean past its target is the
    detection that the mean is not interval-infinite in practice (the
    harmonic-measure mean fails exactly this way).
    """
    eps = F(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    trace: List[str] = []
    start = F(1) if mean.requires_positive_support else F(0)
    prefix = interval_set(start, start + eps / 3)
    stages: List[Tuple[int, float]] = []
    v0 = mean(prefix)
    if not v0.is_finite:
        raise ConstructionFailed(
            f"seed interval outside the mean's domain: {v0.pretty()}", trace
        )
    stages.append((1, float(v0.value)))
    for n in range(2, n_max + 1):
        length = eps / F(2) ** (n + 1)
        placed = _place(mean, prefix, length, threshold=float(n), sign=1, trace=trace)
        if placed is None:
            raise ConstructionFailed(
                f"stage {n}: no placement pushes the mean above {n}; "
                "the mean is not interval-infinite in practice",
                trace,
            )
        prefix = union(prefix, placed)
        v = mean(prefix)
        stages.append((n, float(v.value)))
        trace.append(f"stage {n}: placed {placed!r}, K = {float(v.value):.4g}")
    lam = measure_of(LEBESGUE, prefix).finite
    cert = Certificate(
        kind="thin-infinite",
        lam_total=lam,
        lam_budget=eps,
        stage_values=stages,
        stage_rule="K(prefix at stage n) > n for n >= 2",
    )
    return Construction(result=prefix, certificate=cert)


# ---------------------------------------------------------------------------
# oscillating windows


def build_oscillating(mean: Mean, eps, n_max: int = 8) -> Construction:
    """A thin set whose window means swing above +1 and below -1 forever.

    Greedy alternating placements cover stages 2..n_max; a geometric
    two-sided continuation (positions x8 per stage, the left side 4x the
    right so each swing dominates everything placed before it) keeps the
    oscillation alive, verified by exact evaluation of six extra stages.
    """
    eps = F(eps)
    trace: List[str] = []
    prefix = interval_set(0, eps / 3)
    windows: List[Tuple[Fraction, Fraction]] = []
    stages: List[Tuple[int, float]] = []
    x_lo, y_hi = F(0), eps / 3
    for n in range(2, n_max + 1):
        length = eps / F(2) ** (n + 1)
        sign = 1 if n % 2 == 0 else -1
        placed = _place(
            mean, prefix, length, threshold=float(sign), sign=sign, trace=trace
        )
        if placed is None:
            raise ConstructionFailed(f"stage {n}: oscillation placement failed", trace)
        prefix = union(prefix, placed)
        pb = placed.bounds()
        if sign > 0:
            y_hi = pb.sup.finite
        else:
            x_lo = pb.inf.finite
        windows.append((x_lo, y_hi))
        v = mean(prefix)
        stages.append((n, float(v.value)))
        trace.append(f"stage {n}: K = {float(v.value):.4g} (target sign {sign})")

    hull = prefix.bounds()
    k0 = n_max + 1
    r_scale = 8 * max(hull.sup.finite, -hull.inf.finite, F(1))
    result = None
    for _ in range(5):
        right = BlockFamily(
            SeqForm.term(r_scale / F(8) ** k0, 8, 0),
            SeqForm.term(eps / 2, F(1, 2), 0),
            k0,
        )
        left = BlockFamily(
            SeqForm.term(4 * r_scale / F(8) ** k0, 8, 0),
            SeqForm.term(eps / 4, F(1, 2), 0),
            k0,
        ).map_affine(F(-1), F(0))
        cand = union(prefix, normalize([right]), normalize([left]))
        cont_windows: List[Tuple[Fraction, Fraction]] = []
        good = True
        for n in range(k0, k0 + 6):
            r_hi = right.block(n)[1]
            up_lo = left.block(n - 1)[0] if n > k0 else hull.inf.finite
            v_up = mean(clip(cand, up_lo, r_hi))
            l_lo = left.block(n)[0]
            v_dn = mean(clip(cand, l_lo, r_hi))
            if not (v_up.is_finite and float(v_up.value) > 1):
                good = False
                break
            if not (v_dn.is_finite and float(v_dn.value) < -1):
                good = False
                break
            cont_windows.append((up_lo, r_hi))
            cont_windows.append((l_lo, r_hi))
        if good:
            result = cand
            windows.extend(cont_windows)
            break
        r_scale *= 8
    if result is None:
        raise ConstructionFailed("no geometric continuation keeps the swings", trace)
    lam = measure_of(LEBESGUE, result).finite
    cert = Certificate(
        kind="oscillating",
        lam_total=lam,
        lam_budget=eps,
        stage_values=stages,
        stage_rule="window means alternate above +1 and below -1",
        notes="geometric continuation verified on 6 stages",
    )
    return Construction(result=result, certificate=cert, windows=windows)


# ---------------------------------------------------------------------------
# thin unbounded set with finite mean


def build_thin_finite_unbounded(mean: Mean, eps, n_max: int = 20) -> Construction:
    """An unbounded set of measure <= eps whose extended mean stays <= 1.

    Stage n tries the full block [n, n + eps/2**(n+1)] and halves its length
    until the running mean stays below 1; vanishing blocks recover the
    previous mean, which is the operational form of the continuity and
    null-set-independence hypotheses.  A geometric-length tail, shrunk until
    the exact full-set mean stays below 1, makes the result unbounded.
    """
    eps = F(eps)
    trace: List[str] = []
    prefix = interval_set(0, eps / 2)
    stages: List[Tuple[int, float]] = []
    for n in range(1, n_max + 1):
        length = eps / F(2) ** (n + 1)
        chosen = None
        for _ in range(60):
            cand = union(prefix, interval_set(n, F(n) + length))
            v = mean(cand)
            if v.is_finite and float(v.value) < 1:
                chosen = cand
                break
            length = length / 2
        if chosen is None:
            raise ConstructionFailed(
                f"stage {n}: even vanishing blocks push the mean to 1", trace
            )
        prefix = chosen
        v = mean(prefix)
        stages.append((n, float(v.value)))
        trace.append(f"stage {n}: block length {length}, K = {float(v.value):.6g}")
    delta = eps / 4
    result = None
    for _ in range(60):
        tail = BlockFamily(seq_n(), SeqForm.term(delta, F(1, 2), 0), n_max + 1)
        cand = union(prefix, normalize([tail]))
        v = _eval(mean, cand)
        if v.is_finite and float(v.value) < 1:
            result = cand
            break
        delta = delta / 2
    if result is None:
        raise ConstructionFailed("no geometric tail keeps the mean below 1", trace)
    lam = measure_of(LEBESGUE, result).finite
    cert = Certificate(
        kind="thin-finite-unbounded",
        lam_total=lam,
        lam_budget=eps,
        stage_values=stages,
        stage_rule="K(prefix at every stage) < 1; unbounded via geometric tail",
    )
    return Construction(result=result, certificate=cert)


# ---------------------------------------------------------------------------
# prescribed mean


def build_with_prescribed_mean(mean: Mean, target, tol: float = 1e-8) -> Construction:
    """A set unbounded on both sides whose extended mean equals ``target``.

    Mirrored thin finite-mean tails give a both-side-unbounded core whose
    mean is 0 by symmetry; a calibrating interval grown from the target and
    bisected on its length moves the mean onto the target.
    """
    target = F(target)
    trace: List[str] = []
    side = build_thin_finite_unbounded(mean, F(1, 2), n_max=16).result
    core = union(side, affine(side, -1, 0))
    k = _eval(mean, core)
    if not k.is_finite:
        raise ConstructionFailed(f"core mean is not finite: {k.pretty()}", trace)
    trace.append(f"core mean = {float(k.value):.6g}")
    if abs(float(k.value) - float(target)) <= tol / 4:
        return Construction(core, _prescribed_cert(core, target, tol))
    sign = 1 if float(k.value) < float(target) else -1

    def value_at(length: Fraction) -> float:
        if length == 0:
            return float(k.value)
        piece = (
            interval_set(target, target + length)
            if sign > 0
            else interval_set(target - length, target)
        )
        v = _eval(mean, union(core, piece))
        if not v.is_finite:
            raise ConstructionFailed(f"calibration mean became {v.pretty()}", trace)
        return float(v.value)

    lo, hi = F(0), F(1)
    for _ in range(200):
        val = value_at(hi)
        if (sign > 0 and val > float(target)) or (sign < 0 and val < float(target)):
            break
        lo, hi = hi, hi * 2
    else:
        raise ConstructionFailed("calibration interval never crosses the target", trace)
    best_len, best_err = hi, abs(value_at(hi) - float(target))
    for _ in range(200):
        mid = (lo + hi) / 2
        val = value_at(mid)
        err = abs(val - float(target))
        if err < best_err:
            best_len, best_err = mid, err
        if err <= tol / 4:
            break
        if (val > float(target)) == (sign > 0):
            hi = mid
        else:
            lo = mid
    if best_err > tol / 2:
        raise ConstructionFailed(
            f"calibration stalled at error {best_err:.3g}", trace
        )
    piece = (
        interval_set(target, target + best_len)
        if sign > 0
        else interval_set(target - best_len, target)
    )
    result = union(core, piece)
    return Construction(result, _prescribed_cert(result, target, tol))


def _prescribed_cert(result: RealSet, target: Fraction, tol: float) -> Certificate:
    lam = measure_of(LEBESGUE, result).finite
    return Certificate(
        kind="prescribed-mean",
        lam_total=lam,
        lam_budget=None,
        stage_values=[],
        stage_rule="extended mean equals the target; both sides unbounded",
        target=target,
        tolerance=tol,
    )


# ---------------------------------------------------------------------------
# independent re-verification


def verify_certificate(
    mean: Mean, built: Construction, sched: WindowSchedule = DEFAULT_SCHEDULE
) -> Tuple[bool, List[str]]:
    """Re-check a construction through the public evaluators only."""
    cert = built.certificate
    lines: List[str] = []
    ok = True
    lam = measure_of(LEBESGUE, built.result)
    if not lam.is_finite:
        ok = False
        lines.append("result has infinite measure")
    elif cert.lam_budget is not None and lam.finite > cert.lam_budget:
        ok = False
        lines.append(f"lambda budget violated: {lam.finite} > {cert.lam_budget}")
    else:
        lines.append(f"lambda(result) = {lam.finite}" + (
            f" <= {cert.lam_budget}" if cert.lam_budget is not None else ""
        ))
    if lam.is_finite and lam.finite != cert.lam_total:
        ok = False
        lines.append("certificate lambda total does not match re-measurement")

    if cert.kind == "thin-infinite":
        pieces = sorted((itv.lo.finite, itv.hi.finite) for itv in built.result.intervals)
        running = None
        for idx, (lo, hi) in enumerate(pieces, start=1):
            running = (
                interval_set(lo, hi)
                if running is None
                else union(running, interval_set(lo, hi))
            )
            v = mean(running)
            if idx >= 2 and not (
                v.kind == "+inf" or (v.is_finite and float(v.value) > idx)
            ):
                ok = False
                lines.append(f"stage {idx} mean {v.pretty()} fails > {idx}")
        lines.append(f"re-verified {len(pieces)} greedy stages")
    elif cert.kind == "oscillating":
        assert built.windows
        swings = []
        for x, y in built.windows:
            v = mean(clip(built.result, x, y))
            if v.is_finite:
                swings.append(float(v.value))
        above = sum(1 for s in swings if s > 1)
        below = sum(1 for s in swings if s < -1)
        lines.append(f"windows re-evaluated: {above} above +1, {below} below -1")
        if above < 3 or below < 3:
            ok = False
            lines.append("window means do not oscillate as certified")
        ext = extend_mean(mean, built.result, sched)
        lines.append(f"extension verdict: {ext.pretty()}")
        if ext.value.kind != "divergent":
            ok = False
            lines.append("extension verdict is not divergent")
    elif cert.kind == "thin-finite-unbounded":
        if built.result.is_bounded:
            ok = False
            lines.append("result is bounded")
        ext = extend_mean(mean, built.result, sched)
        lines.append(f"extension verdict: {ext.pretty()}")
        if not (ext.value.is_finite and float(ext.value.value) <= 1 + 1e-9):
            ok = False
            lines.append("extended mean exceeds 1")
    elif cert.kind == "prescribed-mean":
        b = built.result.bounds()
        if not (b.inf.is_neg_inf and b.sup.is_pos_inf):
            ok = False
            lines.append("result is not unbounded on both sides")
        ext = extend_mean(mean, built.result, sched)
        lines.append(f"extension verdict: {ext.pretty()}")
        if not (
            ext.value.is_finite
            and abs(float(ext.value.value) - float(cert.target)) <= cert.tolerance
        ):
            ok = False
            lines.append("extended mean misses the target")
    return ok, lines
