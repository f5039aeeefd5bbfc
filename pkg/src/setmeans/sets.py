"""Exact subsets of the real line: intervals, points, block families, IFS sets.

A :class:`RealSet` is a canonical disjoint union of

* finitely many intervals (rational or infinite endpoints, open/closed),
* finitely many isolated rational points,
* block families ``union_n [b_n, b_n + c_n]`` with closed-form endpoint
  sequences (possibly wrapped by exact reciprocal/affine maps),
* self-similar IFS attractors carrying an outer affine placement, and
* IFS "rows": countably many shrinking copies of one attractor placed along
  a closed-form position sequence with prescribed masses.

All endpoint data is exact rational arithmetic; canonicalization merges
touching intervals, absorbs covered points and blocks, and keeps the
components pairwise disjoint, so value-equal inputs built from intervals and
points produce identical canonical forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .extreal import ExtReal, NEG_INF, POS_INF, ext_max, ext_min
from .seqform import SeqForm

_MATERIALIZE_SMALL = 16  # bounded families up to this many blocks become intervals
_SEARCH_CAP = 1 << 62


class MalformedFamilyError(ValueError):
    """A block family's closed forms violate disjointness or positivity."""


class UnsupportedClipError(ValueError):
    """A clip point lands strictly inside an IFS attractor (not in a gap)."""


class SetDomainError(ValueError):
    """An operation's precondition on the set fails (e.g. reciprocal of 0)."""


class NormalizeError(ValueError):
    """Components overlap in a way canonicalization refuses to guess about."""


# ---------------------------------------------------------------------------
# intervals


@dataclass(frozen=True)
class Interval:
    lo: ExtReal
    hi: ExtReal
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo.is_finite and not isinstance(self.lo.finite, Fraction):
            raise TypeError("interval endpoints must be rational")
        if self.hi.is_finite and not isinstance(self.hi.finite, Fraction):
            raise TypeError("interval endpoints must be rational")
        if self.hi < self.lo:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")
        if not self.lo.is_finite:
            object.__setattr__(self, "lo_closed", False)
        if not self.hi.is_finite:
            object.__setattr__(self, "hi_closed", False)
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise ValueError("degenerate interval must be closed on both ends")

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: Union[Fraction, ExtReal]) -> bool:
        x = ExtReal.of(x)
        if not x.is_finite:
            return False
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo, lo_c = _edge_max_lo(self, other)
        hi, hi_c = _edge_min_hi(self, other)
        if hi < lo or (hi == lo and not (lo_c and hi_c)):
            return None
        return Interval(lo, hi, lo_c, hi_c)

    def touches_or_overlaps(self, other: "Interval") -> bool:
        """True when the union of the two intervals is connected."""
        if self.hi < other.lo:
            return False
        if self.hi == other.lo:
            return self.hi_closed or other.lo_closed
        if other.hi < self.lo:
            return False
        if other.hi == self.lo:
            return other.hi_closed or self.lo_closed
        return True

    def merge(self, other: "Interval") -> "Interval":
        lo, lo_c = self.lo, self.lo_closed
        if other.lo < lo:
            lo, lo_c = other.lo, other.lo_closed
        elif other.lo == lo:
            lo_c = lo_c or other.lo_closed
        hi, hi_c = self.hi, self.hi_closed
        if other.hi > hi:
            hi, hi_c = other.hi, other.hi_closed
        elif other.hi == hi:
            hi_c = hi_c or other.hi_closed
        return Interval(lo, hi, lo_c, hi_c)

    def __repr__(self) -> str:
        lb = "[" if self.lo_closed else "("
        rb = "]" if self.hi_closed else ")"
        return f"{lb}{self.lo},{self.hi}{rb}"


def _edge_max_lo(a: Interval, b: Interval) -> Tuple[ExtReal, bool]:
    if a.lo > b.lo:
        return a.lo, a.lo_closed
    if b.lo > a.lo:
        return b.lo, b.lo_closed
    return a.lo, a.lo_closed and b.lo_closed


def _edge_min_hi(a: Interval, b: Interval) -> Tuple[ExtReal, bool]:
    if a.hi < b.hi:
        return a.hi, a.hi_closed
    if b.hi < a.hi:
        return b.hi, b.hi_closed
    return a.hi, a.hi_closed and b.hi_closed


def iv(lo, hi, lo_closed: bool = True, hi_closed: bool = True) -> Interval:
    """Interval from numbers or ExtReals; infinite ends are forced open."""
    if not isinstance(lo, ExtReal):
        lo = ExtReal(Fraction(lo))
    if not isinstance(hi, ExtReal):
        hi = ExtReal(Fraction(hi))
    return Interval(lo, hi, lo_closed, hi_closed)


# ---------------------------------------------------------------------------
# block families


def _sample_indices(n_start: int, n_end: Optional[int], cheap_cap: Optional[int] = None) -> List[int]:
    ns = list(range(n_start, n_start + 64))
    ns += [n_start + (1 << j) for j in range(7, 21)]
    cap = n_end
    if cheap_cap is not None:
        cap = cheap_cap if cap is None else min(cap, cheap_cap)
    if cap is not None:
        keep = {n for n in ns if n <= cap}
        if n_end is not None and n_end <= cap:
            keep.add(n_end)
        ns = sorted(keep) if keep else [n_start]
    return ns


def cvals_at(form: SeqForm, n: int) -> Fraction:
    return form.evaluate_lossy(n)[0]


class BlockFamily:
    """union of closed blocks [b(n), b(n)+c(n)] for n_start <= n (<= n_end).

    ``c`` may be identically zero (a family of isolated points, e.g. the
    natural numbers); otherwise it must be strictly positive.  Blocks must be
    strictly separated in index order, which is checked exactly on an initial
    segment plus geometrically spaced sample indices.
    """

    __slots__ = ("b", "c", "n_start", "n_end", "increasing", "target")

    def __init__(self, b: SeqForm, c: SeqForm, n_start: int, n_end: Optional[int] = None):
        min_idx = max(b.min_valid_index(), c.min_valid_index())
        if n_start < min_idx:
            raise MalformedFamilyError(
                f"n_start={n_start} below first valid index {min_idx}"
            )
        if n_end is not None and n_end < n_start:
            raise MalformedFamilyError("empty index range")
        self.b = b
        self.c = c
        self.n_start = n_start
        self.n_end = n_end
        cheap = min(b.max_cheap_index(), c.max_cheap_index()) - 1
        samples = _sample_indices(n_start, n_end, cheap)

        def bv(n: int) -> Fraction:
            return b.evaluate_lossy(n)[0]

        cvals = [c.evaluate_lossy(n) for n in samples]
        if any(v < 0 for v, _ in cvals):
            raise MalformedFamilyError("block length sequence takes negative values")
        exact_c = [v for v, e in cvals if e == 0.0]
        if any(v == 0 for v in exact_c) and any(v > 0 for v in exact_c):
            raise MalformedFamilyError(
                "block lengths mix zero and positive values; split the family"
            )
        if n_end is None or n_end > n_start:
            upper = [n for n in samples if n_end is None or n < n_end]
            bdiffs = [bv(n + 1) - bv(n) for n in upper]
            if all(d > 0 for d in bdiffs):
                self.increasing = True
            elif all(d < 0 for d in bdiffs):
                self.increasing = False
            else:
                raise MalformedFamilyError("block positions are not strictly monotone")
            if self.increasing:
                gaps = [bv(n + 1) - bv(n) - cvals_at(c, n) for n in upper]
            else:
                gaps = [bv(n) - bv(n + 1) - cvals_at(c, n + 1) for n in upper]
            if any(g <= 0 for g in gaps):
                raise MalformedFamilyError("blocks overlap or touch")
        else:
            self.increasing = True
        if n_end is None:
            limit = b.limit()
            self.target = limit
            first = ExtReal(bv(n_start))
            if self.increasing and limit <= first:
                raise MalformedFamilyError("increasing family must escape upward")
            if not self.increasing and limit >= first:
                raise MalformedFamilyError("decreasing family must escape downward")
        else:
            self.target = None

    @property
    def degenerate(self) -> bool:
        return self.c.is_zero

    def block(self, n: int) -> Tuple[Fraction, Fraction]:
        # lossy evaluation: geometric terms below 2**-2000 are dropped, far
        # under every tolerance used anywhere in the package
        lo = self.b.evaluate_lossy(n)[0]
        return lo, lo + self.c.evaluate_lossy(n)[0]

    def block_float(self, n: int) -> Tuple[float, float]:
        lo = self.b.evaluate_float(n)
        return lo, lo + self.c.evaluate_float(n)

    def with_range(self, n_start: int, n_end: Optional[int]) -> "BlockFamily":
        """Sub-range of a validated family; checks are inherited, not rerun."""
        if n_start < self.n_start or (
            self.n_end is not None and (n_end is None or n_end > self.n_end)
        ):
            return BlockFamily(self.b, self.c, n_start, n_end)
        obj = object.__new__(BlockFamily)
        obj.b = self.b
        obj.c = self.c
        obj.n_start = n_start
        obj.n_end = n_end
        obj.increasing = self.increasing
        obj.target = self.target if n_end is None else None
        return obj

    def forms(self) -> Optional[Tuple[SeqForm, SeqForm]]:
        return self.b, self.c

    def map_affine(self, alpha: Fraction, t: Fraction) -> "BlockFamily":
        alpha = Fraction(alpha)
        t = Fraction(t)
        if alpha > 0:
            return BlockFamily(
                self.b.affine(alpha, t), self.c * alpha, self.n_start, self.n_end
            )
        nb = (self.b + self.c).affine(alpha, t)
        return BlockFamily(nb, self.c * (-alpha), self.n_start, self.n_end)

    def key(self):
        return ("blockfam", self.b, self.c, self.n_start, self.n_end)

    def __eq__(self, other):
        return isinstance(other, BlockFamily) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        rng = f"{self.n_start}..{'inf' if self.n_end is None else self.n_end}"
        return f"Blocks(b={self.b.to_text()}, c={self.c.to_text()}, n={rng})"


class MappedFamily:
    """A block family seen through a chain of exact maps (affine, reciprocal).

    Reciprocal leaves the closed-form algebra, so measure and moment on a
    mapped family are evaluated by on-demand block enumeration; the block
    endpoints themselves stay exact rationals.
    """

    __slots__ = ("base", "ops")

    def __init__(self, base: BlockFamily, ops: Tuple[tuple, ...]):
        self.base = base
        self.ops = _normalize_ops(ops)

    @property
    def n_start(self) -> int:
        return self.base.n_start

    @property
    def n_end(self) -> Optional[int]:
        return self.base.n_end

    @property
    def degenerate(self) -> bool:
        return self.base.degenerate

    def _apply(self, x: Fraction) -> Fraction:
        for op in self.ops:
            if op[0] == "affine":
                x = op[1] * x + op[2]
            else:
                if x == 0:
                    raise SetDomainError("reciprocal of a family reaching 0")
                x = 1 / x
        return x

    @property
    def orientation(self) -> int:
        sign = 1
        for op in self.ops:
            if op[0] == "affine":
                if op[1] < 0:
                    sign = -sign
            else:
                sign = -sign
        return sign

    @property
    def increasing(self) -> bool:
        return self.base.increasing if self.orientation > 0 else not self.base.increasing

    @property
    def target(self) -> Optional[ExtReal]:
        if self.base.n_end is not None:
            return None
        t: ExtReal = self.base.target
        side_probe = self.base.block(self.base.n_start + 4)[0]
        for op in self.ops:
            if op[0] == "affine":
                t = t * ExtReal(op[1]) + ExtReal(op[2])
                side_probe = op[1] * side_probe + op[2]
            else:
                if not t.is_finite:
                    t = ExtReal(0)
                elif t.finite == 0:
                    t = POS_INF if side_probe > 0 else NEG_INF
                else:
                    t = ExtReal(1 / t.finite)
                if side_probe != 0:
                    side_probe = 1 / side_probe
        return t

    def block(self, n: int) -> Tuple[Fraction, Fraction]:
        lo, hi = self.base.block(n)
        a, b = self._apply(lo), self._apply(hi)
        return (a, b) if a <= b else (b, a)

    def block_float(self, n: int) -> Tuple[float, float]:
        lo, hi = self.base.block_float(n)
        for op in self.ops:
            if op[0] == "affine":
                lo, hi = float(op[1]) * lo + float(op[2]), float(op[1]) * hi + float(op[2])
            else:
                lo, hi = 1.0 / hi, 1.0 / lo
            if lo > hi:
                lo, hi = hi, lo
        return lo, hi

    def with_range(self, n_start: int, n_end: Optional[int]) -> "MappedFamily":
        return MappedFamily(self.base.with_range(n_start, n_end), self.ops)

    def forms(self) -> Optional[Tuple[SeqForm, SeqForm]]:
        """Closed forms of the mapped blocks when the op chain allows it."""
        b, c = self.base.b, self.base.c
        for op in self.ops:
            if op[0] == "affine":
                alpha, t = op[1], op[2]
                if alpha >= 0:
                    b, c = b.affine(alpha, t), c * alpha
                else:
                    b, c = (b + c).affine(alpha, t), c * (-alpha)
            else:
                inv_lo = (b + c).reciprocal_term()
                inv_hi = b.reciprocal_term()
                if inv_lo is None or inv_hi is None:
                    return None
                b, c = inv_lo, inv_hi - inv_lo
        return b, c

    def map_affine(self, alpha: Fraction, t: Fraction) -> "MappedFamily":
        return MappedFamily(
            self.base, self.ops + (("affine", Fraction(alpha), Fraction(t)),)
        )

    def key(self):
        return ("mappedfam", self.base.key(), self.ops)

    def __eq__(self, other):
        return isinstance(other, MappedFamily) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Mapped({self.base!r}, ops={self.ops})"


def _normalize_ops(ops: Iterable[tuple]) -> Tuple[tuple, ...]:
    out: List[tuple] = []
    for op in ops:
        if op[0] == "affine":
            alpha, t = Fraction(op[1]), Fraction(op[2])
            if alpha == 0:
                raise ValueError("affine op on a family must be invertible")
            if out and out[-1][0] == "affine":
                a1, t1 = out[-1][1], out[-1][2]
                merged = ("affine", alpha * a1, alpha * t1 + t)
                out.pop()
                if not (merged[1] == 1 and merged[2] == 0):
                    out.append(merged)
                continue
            if alpha == 1 and t == 0:
                continue
            out.append(("affine", alpha, t))
        elif op[0] == "recip":
            if out and out[-1][0] == "recip":
                out.pop()
                continue
            out.append(("recip",))
        else:
            raise ValueError(f"unknown family op {op!r}")
    return tuple(out)


Family = Union[BlockFamily, MappedFamily]


def family_as_plain(fam: Family) -> Family:
    """Collapse a MappedFamily whose chain stayed inside the closed forms."""
    if isinstance(fam, BlockFamily):
        return fam
    if not fam.ops:
        return fam.base
    forms = fam.forms()
    if forms is None:
        return fam
    b, c = forms
    try:
        return BlockFamily(b, c, fam.n_start, fam.n_end)
    except MalformedFamilyError:
        return fam


# -- increasing-view helpers -------------------------------------------------


class _Reflected:
    """View of a decreasing family as an increasing one (x -> -x)."""

    __slots__ = ("inner",)

    def __init__(self, inner: Family):
        self.inner = inner

    @property
    def n_start(self):
        return self.inner.n_start

    @property
    def n_end(self):
        return self.inner.n_end

    @property
    def degenerate(self):
        return self.inner.degenerate

    @property
    def target(self):
        t = self.inner.target
        return None if t is None else -t

    def block(self, n):
        lo, hi = self.inner.block(n)
        return -hi, -lo


def _oriented(fam: Family):
    """(increasing-view, flipped?) so index searches assume increasing order."""
    if fam.increasing:
        return fam, False
    return _Reflected(fam), True


def _view_last_le(view, x: Fraction, use_hi: bool) -> Optional[int]:
    """Largest n with (block hi if use_hi else lo) <= x, in an increasing view.

    The caller must ensure the predicate eventually turns false (i.e. the
    view escapes above x); otherwise the doubling search raises.
    """

    def val(n: int) -> Fraction:
        lo, hi = view.block(n)
        return hi if use_hi else lo

    n0 = view.n_start
    if val(n0) > x:
        return None
    if view.n_end is not None and val(view.n_end) <= x:
        return view.n_end
    step = 1
    lo_idx = n0
    while True:
        cand = lo_idx + step
        if view.n_end is not None and cand > view.n_end:
            cand = view.n_end
        if val(cand) <= x:
            lo_idx = cand
            if cand == view.n_end:
                return cand
            step *= 2
            if step > _SEARCH_CAP:
                raise MalformedFamilyError("family index search diverged")
        else:
            hi_idx = cand
            break
    while hi_idx - lo_idx > 1:
        mid = (lo_idx + hi_idx) // 2
        if val(mid) <= x:
            lo_idx = mid
        else:
            hi_idx = mid
    return lo_idx


def _view_all_le(view, x: Fraction, use_hi: bool) -> bool:
    """True when every block in the view satisfies (hi|lo) <= x."""
    if view.n_end is not None:
        lo, hi = view.block(view.n_end)
        return (hi if use_hi else lo) <= x
    t = view.target
    return t is not None and t.is_finite and t <= ExtReal(x)


def _family_contains(fam: Family, x: Fraction) -> bool:
    view, flipped = _oriented(fam)
    xx = -x if flipped else x
    lo0, _ = view.block(view.n_start)
    if xx < lo0:
        return False
    if view.n_end is None:
        t = view.target
        if t is not None and t.is_finite and ExtReal(xx) >= t:
            return False
    idx = _view_last_le(view, xx, use_hi=False)
    if idx is None:
        return False
    lo, hi = view.block(idx)
    return lo <= xx <= hi


def _family_span(fam: Family) -> Tuple[ExtReal, ExtReal]:
    view, flipped = _oriented(fam)
    lo = ExtReal(view.block(view.n_start)[0])
    if view.n_end is not None:
        hi = ExtReal(view.block(view.n_end)[1])
    else:
        hi = view.target
    if flipped:
        return -hi, -lo
    return lo, hi


def _family_acc_span(fam: Family) -> Optional[Tuple[ExtReal, ExtReal]]:
    """Hull of the family's contribution to the accumulation set H'."""
    if fam.degenerate:
        if fam.n_end is None:
            t = fam.target
            return (t, t)
        return None
    return _family_span(fam)


# ---------------------------------------------------------------------------
# IFS components


def solve_dimension(ratios: Sequence[Fraction]) -> float:
    """s with sum r_i**s == 1, bisected to ~1e-14; needs a root in (0, 1]."""
    if len(ratios) < 2:
        raise SetDomainError("an IFS needs at least two maps")
    if any(not (0 < r < 1) for r in ratios):
        raise SetDomainError("contraction ratios must lie in (0, 1)")
    rs = [float(r) for r in ratios]

    def g(s: float) -> float:
        return sum(r**s for r in rs) - 1.0

    if g(1.0) > 1e-15:
        raise SetDomainError("sum of ratios exceeds 1: no dimension in (0, 1]")
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = (lo + hi) / 2
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


class FractalPart:
    """A self-similar attractor of affine contractions with an outer affine.

    The natural self-similar measure is normalized to mass one on the base
    attractor; an outer placement x -> scale*x + shift carries mass
    |scale|**s, matching the s-dimensional scaling law, so cylinder pieces
    are again FractalParts with composed outer affines and consistent mass.
    The open set condition is assumed (and weakly checked) for the presets.
    """

    __slots__ = ("maps", "scale", "shift", "s", "_whull")

    def __init__(self, maps, scale=Fraction(1), shift=Fraction(0)):
        maps = tuple(
            sorted(
                ((Fraction(r), Fraction(t)) for r, t in maps),
                key=lambda m: m[1] / (1 - m[0]),
            )
        )
        self.maps = maps
        self.scale = Fraction(scale)
        self.shift = Fraction(shift)
        if self.scale == 0:
            raise SetDomainError("fractal outer scale must be nonzero")
        self.s = solve_dimension([r for r, _ in maps])
        fixed = [t / (1 - r) for r, t in maps]
        self._whull = (min(fixed), max(fixed))
        hulls = sorted(self._base_child_hull(i) for i in range(len(maps)))
        for (a1, b1), (a2, b2) in zip(hulls, hulls[1:]):
            if b1 > a2:
                raise SetDomainError("IFS children overlap; open set condition fails")

    def _base_child_hull(self, i: int) -> Tuple[Fraction, Fraction]:
        r, t = self.maps[i]
        u, v = self._whull
        return (r * u + t, r * v + t)

    @property
    def weights(self) -> Tuple:
        # equal ratios force equal weights summing to one: exact rationals
        ratios = {r for r, _ in self.maps}
        if len(ratios) == 1:
            n = len(self.maps)
            return tuple(Fraction(1, n) for _ in self.maps)
        return tuple(float(r) ** self.s for r, _ in self.maps)

    def base_mean(self):
        """Fixed point of m = sum w_i (r_i m + t_i); exact when weights are."""
        ws = self.weights
        if isinstance(ws[0], Fraction):
            num = sum((w * t for w, (_, t) in zip(ws, self.maps)), Fraction(0))
            den = 1 - sum((w * r for w, (r, _) in zip(ws, self.maps)), Fraction(0))
            return num / den
        num = sum(w * float(t) for w, (_, t) in zip(ws, self.maps))
        den = 1.0 - sum(w * float(r) for w, (r, _) in zip(ws, self.maps))
        return num / den

    def mass(self):
        if abs(self.scale) == 1:
            return Fraction(1)
        return abs(float(self.scale)) ** self.s

    def mean(self):
        bm = self.base_mean()
        if isinstance(bm, Fraction):
            return self.scale * bm + self.shift
        return float(self.scale) * bm + float(self.shift)

    def hull(self) -> Tuple[ExtReal, ExtReal]:
        u, v = self._whull
        a = self.scale * u + self.shift
        b = self.scale * v + self.shift
        if a > b:
            a, b = b, a
        return ExtReal(a), ExtReal(b)

    def child(self, i: int) -> "FractalPart":
        r, t = self.maps[i]
        return FractalPart(self.maps, self.scale * r, self.scale * t + self.shift)

    def contains(self, x: Fraction, depth: int = 64) -> bool:
        lo, hi = self.hull()
        xe = ExtReal(x)
        if xe < lo or xe > hi:
            return False
        if xe == lo or xe == hi:
            return True
        node = self
        for _ in range(depth):
            nxt = None
            for i in range(len(node.maps)):
                c = node.child(i)
                clo, chi = c.hull()
                if clo <= xe <= chi:
                    if xe == clo or xe == chi:
                        return True
                    nxt = c
                    break
            if nxt is None:
                return False
            node = nxt
        return True  # within ~|scale|*r^depth of the attractor; treat as member

    def clip(self, x: ExtReal, y: ExtReal, depth: int = 48):
        """Pieces of the attractor inside [x, y]: FractalParts plus points."""
        parts: List[FractalPart] = []
        pts: List[Fraction] = []

        def visit(node: "FractalPart", d: int):
            lo, hi = node.hull()
            ilo, ihi = ext_max(lo, x), ext_min(hi, y)
            if ihi < ilo:
                return
            if x <= lo and hi <= y:
                parts.append(node)
                return
            if ilo == ihi and (ilo == lo or ihi == hi):
                pts.append(ilo.finite)
                return
            if d <= 0:
                raise UnsupportedClipError(
                    "clip point lies inside the attractor, not in a construction gap"
                )
            for i in range(len(node.maps)):
                visit(node.child(i), d - 1)

        visit(self, depth)
        return parts, pts

    def affine(self, alpha: Fraction, t: Fraction) -> "FractalPart":
        return FractalPart(self.maps, self.scale * alpha, self.shift * alpha + t)

    def key(self):
        return ("fractal", self.maps, self.scale, self.shift)

    def __eq__(self, other):
        return isinstance(other, FractalPart) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Fractal(maps={self.maps}, scale={self.scale}, shift={self.shift})"


class FractalRow:
    """Countably many shrinking copies of a base IFS along a position rule.

    Copy ``n`` sits at ``pos(n)`` with prescribed s-mass ``mass(n)``; the
    copy's outer scale is mass**(1/s) and only hull computations use that
    float.  Realizes s-sets with prescribed total/positional mass.
    """

    __slots__ = ("base", "pos", "mass", "n_start", "mass_factor")

    def __init__(self, base: FractalPart, pos: SeqForm, mass: SeqForm, n_start: int,
                 mass_factor: float = 1.0):
        self.base = base
        self.pos = pos
        self.mass = mass
        self.n_start = n_start
        self.mass_factor = mass_factor
        samples = _sample_indices(n_start, None)
        mvals = [mass.evaluate(n) for n in samples]
        if any(v <= 0 for v in mvals):
            raise MalformedFamilyError("copy masses must be positive")
        pvals = [pos.evaluate(n) for n in samples]
        if not all(b > a for a, b in zip(pvals, pvals[1:])):
            raise MalformedFamilyError("copy positions must increase")
        for n, (a, b) in zip(samples, zip(pvals, pvals[1:])):
            if float(a) + self.copy_width(n) >= float(b):
                raise MalformedFamilyError("copies overlap")
        if not pos.limit().is_pos_inf:
            raise MalformedFamilyError("row positions must escape to +inf")

    @property
    def s(self) -> float:
        return self.base.s

    def copy_scale(self, n: int) -> float:
        return (self.mass_factor * float(self.mass.evaluate(n))) ** (1.0 / self.s)

    def copy_width(self, n: int) -> float:
        u, v = self.base._whull
        return self.copy_scale(n) * float(v - u)

    def copy_mass(self, n: int) -> float:
        return self.mass_factor * float(self.mass.evaluate(n))

    def copy_mean(self, n: int) -> float:
        u, _ = self.base._whull
        return float(self.pos.evaluate(n)) + self.copy_scale(n) * (
            float(self.base.base_mean()) - float(u)
        )

    def hull(self) -> Tuple[ExtReal, ExtReal]:
        return ExtReal(self.pos.evaluate(self.n_start)), POS_INF

    def affine(self, alpha: Fraction, t: Fraction):
        if alpha <= 0:
            raise SetDomainError("rows support positive rescaling only")
        return FractalRow(
            self.base,
            self.pos.affine(alpha, t),
            self.mass,
            self.n_start,
            self.mass_factor * float(alpha) ** self.s,
        )

    def with_start(self, n_start: int) -> "FractalRow":
        return FractalRow(self.base, self.pos, self.mass, n_start, self.mass_factor)

    def key(self):
        return ("row", self.base.key(), self.pos, self.mass, self.n_start, self.mass_factor)

    def __eq__(self, other):
        return isinstance(other, FractalRow) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Row(pos={self.pos.to_text()}, mass={self.mass.to_text()}, s={self.s:.4f})"


def _row_index_last_le(row: FractalRow, x: Fraction) -> Optional[int]:
    """Largest n with pos(n) <= x (positions increase to +inf)."""
    n0 = row.n_start
    if row.pos.evaluate(n0) > x:
        return None
    step = 1
    lo = n0
    while True:
        cand = lo + step
        if row.pos.evaluate(cand) <= x:
            lo = cand
            step *= 2
            if step > _SEARCH_CAP:
                raise MalformedFamilyError("row index search diverged")
        else:
            hi = cand
            break
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if row.pos.evaluate(mid) <= x:
            lo = mid
        else:
            hi = mid
    return lo


def _row_contains(row: FractalRow, x: Fraction) -> bool:
    # exact only at copy anchor points; refuse interior-of-copy questions
    idx = _row_index_last_le(row, x)
    if idx is None:
        return False
    p = row.pos.evaluate(idx)
    if p == x:
        return True
    if float(x) < float(p) + row.copy_width(idx):
        raise NormalizeError(
            "point membership inside a row copy is not decidable exactly"
        )
    return False


# ---------------------------------------------------------------------------
# the canonical set


@dataclass(frozen=True)
class SetBounds:
    inf: ExtReal
    sup: ExtReal
    liminf: Optional[ExtReal]
    limsup: Optional[ExtReal]


class RealSet:
    __slots__ = ("intervals", "points", "families", "fractals", "rows")

    def __init__(self, intervals=(), points=(), families=(), fractals=(), rows=()):
        # builders and normalize() are the public construction surface
        self.intervals: Tuple[Interval, ...] = tuple(intervals)
        self.points: Tuple[Fraction, ...] = tuple(points)
        self.families: Tuple[Family, ...] = tuple(families)
        self.fractals: Tuple[FractalPart, ...] = tuple(fractals)
        self.rows: Tuple[FractalRow, ...] = tuple(rows)

    @property
    def is_empty(self) -> bool:
        return not (
            self.intervals or self.points or self.families or self.fractals or self.rows
        )

    def components(self) -> list:
        return [*self.intervals, *self.points, *self.families, *self.fractals, *self.rows]

    @property
    def is_bounded(self) -> bool:
        if self.is_empty:
            return True
        b = self.bounds()
        return b.inf.is_finite and b.sup.is_finite

    def contains(self, x) -> bool:
        x = x if isinstance(x, Fraction) else Fraction(x)
        xe = ExtReal(x)
        for itv in self.intervals:
            if itv.contains(xe):
                return True
        if x in self.points:
            return True
        for fam in self.families:
            if _family_contains(fam, x):
                return True
        for fr in self.fractals:
            if fr.contains(x):
                return True
        for row in self.rows:
            if _row_contains(row, x):
                return True
        return False

    def bounds(self) -> SetBounds:
        if self.is_empty:
            raise SetDomainError("bounds of the empty set")
        infs: List[ExtReal] = []
        sups: List[ExtReal] = []
        acc_lo: List[ExtReal] = []
        acc_hi: List[ExtReal] = []
        for itv in self.intervals:
            infs.append(itv.lo)
            sups.append(itv.hi)
            if not itv.is_point:
                acc_lo.append(itv.lo)
                acc_hi.append(itv.hi)
        for p in self.points:
            infs.append(ExtReal(p))
            sups.append(ExtReal(p))
        for fam in self.families:
            flo, fhi = _family_span(fam)
            infs.append(flo)
            sups.append(fhi)
            acc = _family_acc_span(fam)
            if acc is not None:
                acc_lo.append(acc[0])
                acc_hi.append(acc[1])
        for fr in self.fractals:
            lo, hi = fr.hull()
            infs.append(lo)
            sups.append(hi)
            acc_lo.append(lo)
            acc_hi.append(hi)
        for row in self.rows:
            lo, hi = row.hull()
            infs.append(lo)
            sups.append(hi)
            acc_lo.append(lo)
            acc_hi.append(hi)
        inf, sup = ext_min(*infs), ext_max(*sups)
        if acc_lo:
            return SetBounds(inf, sup, ext_min(*acc_lo), ext_max(*acc_hi))
        return SetBounds(inf, sup, None, None)

    def acc_spans(self) -> List[Tuple[ExtReal, ExtReal]]:
        """Hulls of each component's contribution to the accumulation set."""
        spans: List[Tuple[ExtReal, ExtReal]] = []
        for itv in self.intervals:
            if not itv.is_point:
                spans.append((itv.lo, itv.hi))
        for fam in self.families:
            acc = _family_acc_span(fam)
            if acc is not None:
                spans.append(acc)
        for fr in self.fractals:
            spans.append(fr.hull())
        for row in self.rows:
            spans.append(row.hull())
        return spans

    def key(self):
        return (
            self.intervals,
            self.points,
            tuple(f.key() for f in self.families),
            tuple(f.key() for f in self.fractals),
            tuple(r.key() for r in self.rows),
        )

    def __eq__(self, other):
        return isinstance(other, RealSet) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if self.is_empty:
            return "RealSet(empty)"
        parts = [repr(c) for c in self.intervals]
        if self.points:
            parts.append("{" + ",".join(str(p) for p in self.points) + "}")
        parts += [repr(f) for f in self.families]
        parts += [repr(f) for f in self.fractals]
        parts += [repr(r) for r in self.rows]
        return " u ".join(parts)


# ---------------------------------------------------------------------------
# normalization


def normalize(components: Iterable) -> RealSet:
    """Canonicalize an arbitrary bag of components into a RealSet."""
    intervals: List[Interval] = []
    points: List[Fraction] = []
    families: List[Family] = []
    fractals: List[FractalPart] = []
    rows: List[FractalRow] = []
    for comp in components:
        if isinstance(comp, Interval):
            if comp.is_point:
                points.append(comp.lo.finite)
            else:
                intervals.append(comp)
        elif isinstance(comp, (Fraction, int)):
            points.append(Fraction(comp))
        elif isinstance(comp, (BlockFamily, MappedFamily)):
            families.append(family_as_plain(comp))
        elif isinstance(comp, FractalPart):
            fractals.append(comp)
        elif isinstance(comp, FractalRow):
            rows.append(comp)
        elif isinstance(comp, RealSet):
            intervals.extend(comp.intervals)
            points.extend(comp.points)
            families.extend(comp.families)
            fractals.extend(comp.fractals)
            rows.extend(comp.rows)
        else:
            raise TypeError(f"unknown component {comp!r}")

    _dedupe_keyed(families)
    _dedupe_keyed(fractals)
    _dedupe_keyed(rows)

    for _ in range(16):
        changed = False
        changed |= _pass_materialize_small(families, intervals, points)
        changed |= _pass_merge_families(families)
        changed |= _pass_family_absorb_blocks(families, intervals, points)
        changed |= _pass_intervals(intervals, points)
        changed |= _pass_family_vs_interval(families, intervals, points)
        changed |= _pass_points(points, intervals, families, fractals, rows)
        changed |= _pass_fractal_reassemble(fractals)
        if not changed:
            break
    else:
        raise NormalizeError("canonicalization did not reach a fixed point")

    _check_family_family(families)
    _absorb_and_check_fractals(fractals, intervals, families)
    _check_rows(rows, intervals, families, fractals)

    intervals.sort(key=_iv_sort_key)
    points.sort()
    families.sort(key=lambda f: _span_sort_key(_family_span(f)))
    fractals.sort(key=lambda f: _span_sort_key(f.hull()))
    rows.sort(key=lambda r: _span_sort_key(r.hull()))
    return RealSet(
        tuple(intervals), tuple(points), tuple(families), tuple(fractals), tuple(rows)
    )


def _dedupe_keyed(items: list) -> None:
    seen = set()
    for idx in range(len(items) - 1, -1, -1):
        k = items[idx].key()
        if k in seen:
            del items[idx]
        else:
            seen.add(k)


def _iv_sort_key(itv: Interval):
    return _span_sort_key((itv.lo, itv.hi))


def _span_sort_key(span: Tuple[ExtReal, ExtReal]):
    def rank(e: ExtReal):
        if e.is_neg_inf:
            return (-1, Fraction(0))
        if e.is_pos_inf:
            return (1, Fraction(0))
        return (0, e.finite)

    return (rank(span[0]), rank(span[1]))


def _pass_materialize_small(families, intervals, points) -> bool:
    changed = False
    for idx in range(len(families) - 1, -1, -1):
        fam = families[idx]
        if fam.n_end is not None and fam.n_end - fam.n_start + 1 <= _MATERIALIZE_SMALL:
            del families[idx]
            for n in range(fam.n_start, fam.n_end + 1):
                lo, hi = fam.block(n)
                if lo == hi:
                    points.append(lo)
                else:
                    intervals.append(iv(lo, hi))
            changed = True
    return changed


def _pass_merge_families(families) -> bool:
    changed = False
    i = 0
    while i < len(families):
        j = i + 1
        while j < len(families):
            merged = _try_merge_family_pair(families[i], families[j])
            if merged is not None:
                families[i] = merged
                del families[j]
                changed = True
            else:
                j += 1
        i += 1
    return changed


def _same_family_rule(a: Family, b: Family) -> bool:
    if isinstance(a, BlockFamily) and isinstance(b, BlockFamily):
        return a.b == b.b and a.c == b.c
    if isinstance(a, MappedFamily) and isinstance(b, MappedFamily):
        return a.base.b == b.base.b and a.base.c == b.base.c and a.ops == b.ops
    return False


def _try_merge_family_pair(a: Family, b: Family) -> Optional[Family]:
    """Same rule with adjacent or overlapping index ranges: one family."""
    if not _same_family_rule(a, b):
        return None
    x, y = (a, b) if a.n_start <= b.n_start else (b, a)
    if x.n_end is None:
        return x  # y's range is contained in x's
    if y.n_start <= x.n_end + 1:
        new_end = None if y.n_end is None else max(x.n_end, y.n_end)
        return x.with_range(x.n_start, new_end)
    return None


def _family_rule_key(fam: Family) -> tuple:
    if isinstance(fam, BlockFamily):
        return (fam.b.to_text(), fam.c.to_text(), "")
    return (fam.base.b.to_text(), fam.base.c.to_text(), repr(fam.ops))


def _pass_family_absorb_blocks(families, intervals, points) -> bool:
    """Re-absorb explicit components that exactly match blocks adjacent to a
    family's index range (the leftovers of clipping between blocks).

    Families are processed in a fixed rule order so that a point lying on
    two families' adjacent blocks is always grabbed by the same one.
    """
    changed = False
    families.sort(key=_family_rule_key)
    for fi in range(len(families)):
        fam = families[fi]
        while True:
            grew = False
            for idx, delta in ((fam.n_start - 1, -1), (None, +1)):
                if delta > 0:
                    if fam.n_end is None:
                        continue
                    idx = fam.n_end + 1
                try:
                    lo, hi = fam.block(idx)
                except (ValueError, MalformedFamilyError):
                    continue
                if lo == hi:
                    if lo in points:
                        points.remove(lo)
                    else:
                        continue
                else:
                    probe = iv(lo, hi)
                    if probe in intervals:
                        intervals.remove(probe)
                    else:
                        continue
                if delta < 0:
                    fam = fam.with_range(idx, fam.n_end)
                else:
                    fam = fam.with_range(fam.n_start, idx)
                grew = True
                changed = True
            if not grew:
                break
        families[fi] = fam
    return changed


def _pass_intervals(intervals, points) -> bool:
    changed = False
    for idx in range(len(intervals)):
        itv = intervals[idx]
        for p in list(points):
            pe = ExtReal(p)
            if not itv.lo_closed and pe == itv.lo:
                itv = Interval(itv.lo, itv.hi, True, itv.hi_closed)
                points.remove(p)
                changed = True
            elif not itv.hi_closed and pe == itv.hi:
                itv = Interval(itv.lo, itv.hi, itv.lo_closed, True)
                points.remove(p)
                changed = True
        intervals[idx] = itv
    intervals.sort(key=_iv_sort_key)
    i = 0
    while i < len(intervals) - 1:
        if intervals[i].touches_or_overlaps(intervals[i + 1]):
            intervals[i] = intervals[i].merge(intervals[i + 1])
            del intervals[i + 1]
            changed = True
        else:
            i += 1
    return changed


def _pass_points(points, intervals, families, fractals, rows) -> bool:
    changed = False
    seen = set()
    for idx in range(len(points) - 1, -1, -1):
        p = points[idx]
        covered = p in seen
        seen.add(p)
        if not covered:
            pe = ExtReal(p)
            covered = any(itv.contains(pe) for itv in intervals)
        if not covered:
            covered = any(_family_contains(f, p) for f in families)
        if not covered:
            covered = any(f.contains(p) for f in fractals)
        if not covered:
            covered = any(_row_contains(r, p) for r in rows)
        if covered:
            del points[idx]
            changed = True
    return changed


def _pass_family_vs_interval(families, intervals, points) -> bool:
    changed = False
    fi = 0
    while fi < len(families):
        fam = families[fi]
        interacted = False
        for ii in range(len(intervals)):
            result = _split_family_around_interval(fam, intervals[ii])
            if result is None:
                continue
            leftovers, new_itv = result
            intervals[ii] = new_itv
            del families[fi]
            for part in leftovers:
                families.append(part)
            changed = True
            interacted = True
            break
        if not interacted:
            fi += 1
    return changed


def _split_family_around_interval(fam: Family, itv: Interval):
    """Absorb blocks of ``fam`` that meet ``itv``, extending the interval.

    Returns (leftover families, extended interval) or None when no block
    meets the interval.  Work happens in the increasing view; index ranges
    are identical in both views, so leftovers use the original family.
    """
    view, flipped = _oriented(fam)
    if flipped:
        jlo, jhi = -itv.hi, -itv.lo
        jlo_c, jhi_c = itv.hi_closed, itv.lo_closed
    else:
        jlo, jhi = itv.lo, itv.hi
        jlo_c, jhi_c = itv.lo_closed, itv.hi_closed

    n0, n_end = view.n_start, view.n_end

    # first interacting index: blocks are closed, so touching always connects
    if jlo.is_neg_inf or ExtReal(view.block(n0)[1]) >= jlo:
        n_first = n0
    else:
        if _view_all_le(view, jlo.finite, use_hi=True):
            return None  # family accumulates strictly below the interval
        q = _view_last_le(view, jlo.finite, use_hi=True)
        if q is None:
            n_first = n0
        elif ExtReal(view.block(q)[1]) == jlo:
            n_first = q
        else:
            n_first = q + 1
            if n_end is not None and n_first > n_end:
                return None

    if not jhi.is_pos_inf and ExtReal(view.block(n_first)[0]) > jhi:
        return None

    # last interacting index (None sentinel = the whole infinite tail)
    tail_absorbed = False
    if jhi.is_pos_inf:
        n_last = n_end
        tail_absorbed = n_end is None
    elif _view_all_le(view, jhi.finite, use_hi=False):
        n_last = n_end
        tail_absorbed = n_end is None
    else:
        n_last = _view_last_le(view, jhi.finite, use_hi=False)
        if n_last is None:
            return None

    # extend the interval over the absorbed blocks (view coordinates)
    new_lo, new_lo_c = jlo, jlo_c
    new_hi, new_hi_c = jhi, jhi_c
    first_lo = ExtReal(view.block(n_first)[0])
    if first_lo < new_lo:
        new_lo, new_lo_c = first_lo, True
    elif first_lo == new_lo:
        new_lo_c = True
    if tail_absorbed:
        t = view.target
        if t > new_hi:
            new_hi, new_hi_c = t, False
        leftovers = []
        if n_first > n0:
            leftovers.append(fam.with_range(n0, n_first - 1))
    else:
        last_hi = ExtReal(view.block(n_last)[1])
        if last_hi > new_hi:
            new_hi, new_hi_c = last_hi, True
        elif last_hi == new_hi:
            new_hi_c = True
        leftovers = []
        if n_first > n0:
            leftovers.append(fam.with_range(n0, n_first - 1))
        if n_end is None or (n_last is not None and n_last < n_end):
            leftovers.append(fam.with_range(n_last + 1, n_end))

    if flipped:
        out_itv = Interval(-new_hi, -new_lo, new_hi_c, new_lo_c)
    else:
        out_itv = Interval(new_lo, new_hi, new_lo_c, new_hi_c)
    return leftovers, out_itv


def _pass_fractal_reassemble(fractals: List[FractalPart]) -> bool:
    """Replace a complete sibling set of cylinders by their parent attractor.

    Clipping at a construction gap splits an attractor into whole cylinder
    pieces; re-unioning them must reproduce the original component.
    """
    changed = False
    progress = True
    while progress:
        progress = False
        by_maps: dict = {}
        for fr in fractals:
            by_maps.setdefault(fr.maps, []).append(fr)
        for maps, group in by_maps.items():
            if len(group) < len(maps):
                continue
            for cand in group:
                r0, t0 = maps[0]
                p_scale = cand.scale / r0
                p_shift = cand.shift - p_scale * t0
                try:
                    parent = FractalPart(maps, p_scale, p_shift)
                except SetDomainError:
                    continue
                children = [parent.child(i) for i in range(len(maps))]
                if all(ch in group for ch in children):
                    for ch in children:
                        fractals.remove(ch)
                    fractals.append(parent)
                    changed = True
                    progress = True
                    break
            if progress:
                break
    return changed


def _check_family_family(families) -> None:
    for a, b in itertools.combinations(families, 2):
        alo, ahi = _family_span(a)
        blo, bhi = _family_span(b)
        if ahi < blo or bhi < alo:
            continue
        blocks = []
        for fam in (a, b):
            view, flipped = _oriented(fam)
            last = view.n_start + 127
            if view.n_end is not None:
                last = min(last, view.n_end)
            for n in range(view.n_start, last + 1):
                lo, hi = view.block(n)
                blocks.append((lo, hi))
        blocks.sort()
        for (l1, h1), (l2, h2) in zip(blocks, blocks[1:]):
            if h1 > l2:
                raise NormalizeError(
                    f"families overlap near [{l2}, {h1}]; refusing to canonicalize"
                )


def _absorb_and_check_fractals(fractals, intervals, families) -> None:
    for idx in range(len(fractals) - 1, -1, -1):
        fr = fractals[idx]
        lo, hi = fr.hull()
        dropped = False
        for itv in intervals:
            covers_lo = itv.lo < lo or (itv.lo == lo and itv.lo_closed)
            covers_hi = itv.hi > hi or (itv.hi == hi and itv.hi_closed)
            if covers_lo and covers_hi:
                del fractals[idx]
                dropped = True
                break
            if itv.hi < lo or itv.lo > hi or itv.hi == lo or itv.lo == hi:
                continue
            raise NormalizeError("interval partially overlaps an IFS attractor hull")
        if dropped:
            continue
        for fam in families:
            flo, fhi = _family_span(fam)
            if fhi < lo or flo > hi:
                continue
            raise NormalizeError("family overlaps an IFS attractor hull")
    for a, b in itertools.combinations(fractals, 2):
        alo, ahi = a.hull()
        blo, bhi = b.hull()
        if not (ahi <= blo or bhi <= alo):
            raise NormalizeError("attractor hulls overlap")


def _check_rows(rows, intervals, families, fractals) -> None:
    if not rows:
        return
    if len(rows) > 1:
        raise NormalizeError("at most one IFS row per set is supported")
    row = rows[0]
    lo, _ = row.hull()
    for itv in intervals:
        if itv.hi >= lo:
            raise NormalizeError("interval overlaps an IFS row region")
    for fam in families:
        _, fhi = _family_span(fam)
        if fhi >= lo:
            raise NormalizeError("family overlaps an IFS row region")
    for fr in fractals:
        _, fhi = fr.hull()
        if fhi >= lo:
            raise NormalizeError("attractor overlaps an IFS row region")


# ---------------------------------------------------------------------------
# the spec's operations


def union(*sets: RealSet) -> RealSet:
    return normalize(sets)


def clip(h: RealSet, x, y) -> RealSet:
    """H ∩ [x, y]; corners may be infinite, and a reversed pair is swapped."""
    x = ExtReal.of(x) if isinstance(x, (ExtReal, float)) else ExtReal(Fraction(x))
    y = ExtReal.of(y) if isinstance(y, (ExtReal, float)) else ExtReal(Fraction(y))
    if y < x:
        x, y = y, x
    if x.is_pos_inf or y.is_neg_inf:
        raise SetDomainError("degenerate infinite clip window")
    window = Interval(x, y, x.is_finite, y.is_finite)
    out: List = []
    for itv in h.intervals:
        r = itv.intersect(window)
        if r is not None:
            out.append(r)
    for p in h.points:
        if x <= ExtReal(p) <= y:
            out.append(p)
    for fam in h.families:
        out.extend(_clip_family(fam, x, y))
    for fr in h.fractals:
        parts, pts = fr.clip(x, y)
        out.extend(parts)
        out.extend(pts)
    for row in h.rows:
        out.extend(_clip_row(row, x, y))
    return normalize(out)


def _clip_family(fam: Family, x: ExtReal, y: ExtReal) -> List:
    """Components of fam ∩ [x, y] (sub-families plus materialized edges)."""
    view, flipped = _oriented(fam)
    wx, wy = (-y, -x) if flipped else (x, y)
    pieces: List = []
    n0, n_end = view.n_start, view.n_end

    # first index whose block reaches wx
    if wx.is_neg_inf or ExtReal(view.block(n0)[1]) >= wx:
        n_first = n0
    else:
        if _view_all_le(view, wx.finite, use_hi=True):
            return []
        q = _view_last_le(view, wx.finite, use_hi=True)
        if q is None:
            n_first = n0
        elif ExtReal(view.block(q)[1]) == wx:
            n_first = q
        else:
            n_first = q + 1
            if n_end is not None and n_first > n_end:
                return []
    if not wy.is_pos_inf and ExtReal(view.block(n_first)[0]) > wy:
        return []

    # last index whose block starts at or below wy (None = infinite tail kept)
    keep_tail = False
    if wy.is_pos_inf:
        n_last = n_end
        keep_tail = n_end is None
    elif _view_all_le(view, wy.finite, use_hi=False):
        n_last = n_end
        keep_tail = n_end is None
    else:
        n_last = _view_last_le(view, wy.finite, use_hi=False)
        if n_last is None:
            return []

    def emit_block(n: int):
        lo, hi = view.block(n)
        clo = lo if wx.is_neg_inf else max(lo, wx.finite)
        chi = hi if wy.is_pos_inf else min(hi, wy.finite)
        if clo > chi:
            return
        a, b = (-chi, -clo) if flipped else (clo, chi)
        if a == b:
            pieces.append(a)
        else:
            pieces.append(iv(a, b))

    if keep_tail:
        tail_start = n_first
        lo, hi = view.block(n_first)
        if wx.is_finite and lo < wx.finite <= hi:
            emit_block(n_first)
            tail_start = n_first + 1
        pieces.append(fam.with_range(tail_start, None))
        return pieces

    if n_last < n_first:
        return []
    if n_last - n_first + 1 <= _MATERIALIZE_SMALL:
        for n in range(n_first, n_last + 1):
            emit_block(n)
        return pieces
    inner_first, inner_last = n_first, n_last
    lo, hi = view.block(n_first)
    if wx.is_finite and lo < wx.finite:
        emit_block(n_first)
        inner_first += 1
    lo, hi = view.block(n_last)
    if wy.is_finite and hi > wy.finite:
        emit_block(n_last)
        inner_last -= 1
    if inner_first <= inner_last:
        pieces.append(fam.with_range(inner_first, inner_last))
    return pieces


def _clip_row(row: FractalRow, x: ExtReal, y: ExtReal) -> List:
    if not y.is_pos_inf:
        first_pos = ExtReal(row.pos.evaluate(row.n_start))
        if y < first_pos:
            return []
        raise UnsupportedClipError(
            "rows are unbounded above; finite upper clips are not supported"
        )
    if not x.is_finite:
        return [row]
    n = row.n_start
    while True:
        p = row.pos.evaluate(n)
        if p >= x.finite:
            return [row.with_start(n)]
        if float(p) + row.copy_width(n) > float(x.finite):
            raise UnsupportedClipError("clip point lands inside a row copy")
        n += 1
        if n - row.n_start > 10**6:
            raise UnsupportedClipError("row clip search exceeded its budget")


def affine(h: RealSet, alpha, t) -> RealSet:
    """{alpha*h + t : h in H}; alpha = 0 collapses to the single point t."""
    alpha = Fraction(alpha)
    t = Fraction(t)
    if h.is_empty:
        return h
    if alpha == 0:
        return normalize([t])
    out: List = []
    for itv in h.intervals:
        lo = itv.lo * ExtReal(alpha) + ExtReal(t)
        hi = itv.hi * ExtReal(alpha) + ExtReal(t)
        if alpha > 0:
            out.append(Interval(lo, hi, itv.lo_closed, itv.hi_closed))
        else:
            out.append(Interval(hi, lo, itv.hi_closed, itv.lo_closed))
    for p in h.points:
        out.append(alpha * p + t)
    for fam in h.families:
        out.append(fam.map_affine(alpha, t))
    for fr in h.fractals:
        out.append(fr.affine(alpha, t))
    for row in h.rows:
        out.append(row.affine(alpha, t))
    return normalize(out)


def shift(h: RealSet, t) -> RealSet:
    return affine(h, 1, t)


def reciprocal(h: RealSet) -> RealSet:
    """{1/h : h in H}; every element of H must be strictly positive."""
    if h.is_empty:
        raise SetDomainError("reciprocal of the empty set")
    b = h.bounds()
    if b.inf < ExtReal(0) or (b.inf == ExtReal(0) and h.contains(Fraction(0))):
        raise SetDomainError("reciprocal needs a strictly positive set")
    if h.fractals or h.rows:
        raise SetDomainError("reciprocal of IFS components is not representable")
    out: List = []
    for itv in h.intervals:
        lo = ExtReal(0) if itv.hi.is_pos_inf else ExtReal(1 / itv.hi.finite)
        if itv.lo.is_finite and itv.lo.finite > 0:
            hi = ExtReal(1 / itv.lo.finite)
        else:
            hi = POS_INF
        out.append(Interval(lo, hi, itv.hi_closed, itv.lo_closed))
    for p in h.points:
        out.append(1 / p)
    for fam in h.families:
        if isinstance(fam, BlockFamily):
            out.append(family_as_plain(MappedFamily(fam, (("recip",),))))
        else:
            out.append(family_as_plain(MappedFamily(fam.base, fam.ops + (("recip",),))))
    return normalize(out)


def next_gap_inf(h: RealSet, x: Fraction) -> Optional[ExtReal]:
    """inf([x, +inf) - H), or None when that set is empty."""
    if not h.contains(x):
        return ExtReal(x)
    xe = ExtReal(x)
    for itv in h.intervals:
        if itv.contains(xe):
            if itv.hi.is_pos_inf:
                return None
            return itv.hi
    if x in h.points:
        return xe
    for fam in h.families:
        if _family_contains(fam, x):
            view, flipped = _oriented(fam)
            xx = -x if flipped else x
            idx = _view_last_le(view, xx, use_hi=False)
            lo, hi = view.block(idx)
            if lo == hi:
                return xe
            return ExtReal(-lo if flipped else hi)
    # inside a fractal or row copy: gaps accumulate immediately above
    return xe


def intersects_window(h: RealSet, lo: Fraction, hi: Fraction) -> bool:
    """Does H meet the half-open window [lo, hi)?  Lightweight, no clipping."""
    if not lo < hi:
        return False
    lo_e, hi_e = ExtReal(lo), ExtReal(hi)
    for itv in h.intervals:
        if itv.hi < lo_e or (itv.hi == lo_e and not itv.hi_closed):
            continue
        if itv.lo >= hi_e:
            continue
        return True
    for p in h.points:
        if lo <= p < hi:
            return True
    for fam in h.families:
        if _family_meets_window(fam, lo, hi):
            return True
    for fr in h.fractals:
        if _fractal_meets(fr, lo, hi):
            return True
    for row in h.rows:
        idx = _row_index_last_le(row, hi)
        if idx is None:
            continue
        p = row.pos.evaluate(idx)
        if p >= lo and p < hi:
            return True
        if p < lo and float(p) + row.copy_width(idx) > float(lo):
            return True  # the copy's hull reaches into the window
    return False


def _family_meets_window(fam: Family, lo: Fraction, hi: Fraction) -> bool:
    view, flipped = _oriented(fam)
    if flipped:
        # window in view coordinates is (-hi, -lo]
        wlo, whi = -hi, -lo
        if _view_all_le(view, whi, use_hi=False):
            t = view.target
            return t is not None and t > ExtReal(wlo)
        q = _view_last_le(view, whi, use_hi=False)
        if q is None:
            return False
        return view.block(q)[1] > wlo
    # window is [lo, hi)
    if _view_all_le(view, lo, use_hi=True):
        # a bounded family may still touch the closed window edge
        return view.n_end is not None and view.block(view.n_end)[1] == lo
    q = _view_last_le(view, lo, use_hi=False)
    if q is not None and view.block(q)[1] >= lo:
        return True
    nxt = view.n_start if q is None else q + 1
    if view.n_end is not None and nxt > view.n_end:
        return False
    return view.block(nxt)[0] < hi


def _fractal_meets(fr: FractalPart, lo: Fraction, hi: Fraction, depth: int = 48) -> bool:
    flo, fhi = fr.hull()
    lo_e, hi_e = ExtReal(lo), ExtReal(hi)
    if fhi < lo_e or flo >= hi_e:
        return False
    # hull endpoints always belong to the attractor
    if lo_e <= flo < hi_e or lo_e <= fhi < hi_e:
        return True
    if depth == 0:
        return True
    return any(_fractal_meets(fr.child(i), lo, hi, depth - 1) for i in range(len(fr.maps)))


# ---------------------------------------------------------------------------
# convenience builders


def empty_set() -> RealSet:
    return RealSet()


def interval_set(lo, hi, lo_closed: bool = True, hi_closed: bool = True) -> RealSet:
    return normalize([iv(lo, hi, lo_closed, hi_closed)])


def point_set(*ps) -> RealSet:
    return normalize([Fraction(p) for p in ps])


def family_set(b: SeqForm, c: SeqForm, n_start: int, n_end: Optional[int] = None) -> RealSet:
    return normalize([BlockFamily(b, c, n_start, n_end)])


def fractal_set(maps, scale=1, shift=0) -> RealSet:
    return normalize([FractalPart(maps, Fraction(scale), Fraction(shift))])
