"""Closed-form integer sequences and their exact/rigorously-bounded series.

A :class:`SeqForm` is a finite sum of terms ``c * rho**n * n**k`` with
rational ``c``, rational ``rho > 0`` and integer ``k`` (negative powers
allowed).  The family covers every sequence the block-family catalog needs
(arithmetic positions, geometric lengths, ``n**2``, ``2**n``, ``1/n``,
``1/(n**2 * 2**n)``) and is closed under addition, products and affine maps,
which keeps disjointness checks and measure/moment series in one small
algebra.

Series over a form are summed exactly when every term is polynomial-times-
geometric (``k >= 0``); terms with negative ``k`` fall back to partial sums
with a rigorous remainder bound (geometric domination for ``rho < 1``,
Euler-Maclaurin with an explicit error term for ``rho == 1, k <= -2``).
Divergence is classified symbolically from the dominant term, never from a
truncated numeric sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Optional, Tuple, Union

from .extreal import ExtReal, NEG_INF, POS_INF

Key = Tuple[Fraction, int]  # (rho, k)

_REL_TOL = Fraction(1, 10**12)
_MAX_TERMS = 10**6


class SeriesCapExceeded(ArithmeticError):
    """Raised when a series needs more than the hard term cap to certify."""


@dataclass(frozen=True)
class SeriesSum:
    """Value of a series: a finite total with an error bound, or +/-inf."""

    value: Union[Fraction, float]
    err: float
    infinite: int = 0  # 0 finite, +1/-1 for a divergent sum

    @property
    def exact(self) -> bool:
        return self.infinite == 0 and isinstance(self.value, Fraction) and self.err == 0.0

    def as_extreal(self) -> ExtReal:
        if self.infinite > 0:
            return POS_INF
        if self.infinite < 0:
            return NEG_INF
        return ExtReal(self.value)

    def __add__(self, other: "SeriesSum") -> "SeriesSum":
        if self.infinite or other.infinite:
            if self.infinite and other.infinite and self.infinite != other.infinite:
                raise ArithmeticError("sum of opposite infinite series")
            sign = self.infinite or other.infinite
            return SeriesSum(Fraction(0), 0.0, sign)
        a, b = self.value, other.value
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            return SeriesSum(a + b, self.err + other.err)
        return SeriesSum(float(a) + float(b), self.err + other.err)


# ---------------------------------------------------------------------------
# exact helpers


@lru_cache(maxsize=None)
def _binomial(n: int, r: int) -> int:
    return math.comb(n, r)


@lru_cache(maxsize=None)
def _faulhaber_coeffs(k: int) -> Tuple[Fraction, ...]:
    """Coefficients of the degree-(k+1) polynomial p with p(M) = sum_{n=1}^M n**k."""
    # (k+1) * S_k(M) = (M+1)**(k+1) - 1 - sum_{j<k} C(k+1, j) * S_j(M)
    if k == 0:
        return (Fraction(0), Fraction(1))  # S_0(M) = M
    # polynomial arithmetic on coefficient lists (index = power of M)
    target = [Fraction(0)] * (k + 2)
    for j in range(k + 2):  # (M+1)^(k+1) expanded
        target[j] += Fraction(_binomial(k + 1, j))
    target[0] -= 1
    for j in range(k):
        cj = Fraction(_binomial(k + 1, j))
        for idx, coef in enumerate(_faulhaber_coeffs(j)):
            target[idx] -= cj * coef
    return tuple(c / (k + 1) for c in target)


def faulhaber(k: int, m_hi: int) -> Fraction:
    """Exact sum of n**k for n = 1..m_hi (k >= 0)."""
    if m_hi <= 0:
        return Fraction(0)
    total = Fraction(0)
    power = Fraction(1)
    for coef in _faulhaber_coeffs(k):
        total += coef * power
        power *= m_hi
    return total


@lru_cache(maxsize=None)
def _geom_poly_closed_form(rho: Fraction, k: int) -> Tuple[Fraction, Tuple[Fraction, ...]]:
    """Closed form T(M) = C + rho**(M+1) * P(M) for T(M) = sum_{n=0}^M n**k rho**n.

    Returns (C, coefficients of P).  Valid for rho != 1, k >= 0; solved once
    per (rho, k) by exact Gaussian elimination against directly-computed
    small prefix sums.
    """
    assert rho != 1 and k >= 0
    nvars = k + 2  # C, p_0 .. p_k
    rows = []
    rhs = []
    direct = Fraction(0)
    rho_pow = Fraction(1)  # rho**n
    for m_hi in range(nvars):
        direct += Fraction(m_hi) ** k * rho_pow if (m_hi or k == 0) else 0
        rho_pow *= rho
        row = [Fraction(1)]
        scale = rho ** (m_hi + 1)
        mp = Fraction(1)
        for _ in range(k + 1):
            row.append(scale * mp)
            mp *= m_hi
        rows.append(row)
        rhs.append(direct)
    # Gaussian elimination, exact
    for col in range(nvars):
        pivot = next(r for r in range(col, nvars) if rows[r][col] != 0)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
        inv = 1 / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        rhs[col] *= inv
        for r in range(nvars):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
                rhs[r] -= factor * rhs[col]
    return rhs[0], tuple(rhs[1:])


def geom_poly_prefix(rho: Fraction, k: int, m_hi: int) -> Fraction:
    """Exact sum of n**k * rho**n for n = 0..m_hi (rho != 1, k >= 0)."""
    if m_hi < 0:
        return Fraction(0)
    c0, pcoeffs = _geom_poly_closed_form(rho, k)
    acc = Fraction(0)
    mp = Fraction(1)
    for coef in pcoeffs:
        acc += coef * mp
        mp *= m_hi
    return c0 + rho ** (m_hi + 1) * acc


def _harmonic_range(m: int, m_hi: int) -> Tuple[float, float]:
    """sum of 1/n for n = m..m_hi with an error bound (float)."""
    if m_hi < m:
        return 0.0, 0.0
    if m_hi - m <= 2**16:
        return math.fsum(1.0 / n for n in range(m, m_hi + 1)), 1e-14 * (m_hi - m + 1)

    def hn(x: int) -> float:
        # H_x, by direct sum for small x and Euler-Maclaurin beyond
        if x <= 0:
            return 0.0
        if x <= 4096:
            return math.fsum(1.0 / i for i in range(1, x + 1))
        return math.log(x) + 0.5772156649015328606 + 1 / (2 * x) - 1 / (12 * x * x)

    err = 1 / (120.0 * 4096.0**4) * 2 + 1e-13
    return hn(m_hi) - hn(m - 1), err


# ---------------------------------------------------------------------------
# the form itself


class SeqForm:
    """Finite sum of terms c * rho**n * n**k (exact rational data)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Key, Fraction]] = None):
        clean: Dict[Key, Fraction] = {}
        if terms:
            for (rho, k), c in terms.items():
                rho = Fraction(rho)
                if rho <= 0:
                    raise ValueError("rho must be a positive rational")
                c = Fraction(c)
                if c == 0:
                    continue
                key = (rho, int(k))
                clean[key] = clean.get(key, Fraction(0)) + c
                if clean[key] == 0:
                    del clean[key]
        self.terms = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def const(cls, c) -> "SeqForm":
        return cls({(Fraction(1), 0): Fraction(c)})

    @classmethod
    def var(cls) -> "SeqForm":
        """The sequence b_n = n."""
        return cls({(Fraction(1), 1): Fraction(1)})

    @classmethod
    def term(cls, c, rho=1, k: int = 0) -> "SeqForm":
        return cls({(Fraction(rho), int(k)): Fraction(c)})

    # -- algebra ----------------------------------------------------------

    def __add__(self, other: "SeqForm") -> "SeqForm":
        merged = dict(self.terms)
        for key, c in other.terms.items():
            merged[key] = merged.get(key, Fraction(0)) + c
        return SeqForm(merged)

    def __neg__(self) -> "SeqForm":
        return SeqForm({key: -c for key, c in self.terms.items()})

    def __sub__(self, other: "SeqForm") -> "SeqForm":
        return self + (-other)

    def __mul__(self, other: Union["SeqForm", int, Fraction]) -> "SeqForm":
        if isinstance(other, (int, Fraction)):
            return SeqForm({key: c * other for key, c in self.terms.items()})
        out: Dict[Key, Fraction] = {}
        for (r1, k1), c1 in self.terms.items():
            for (r2, k2), c2 in other.terms.items():
                key = (r1 * r2, k1 + k2)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return SeqForm(out)

    __rmul__ = __mul__

    def affine(self, alpha, t) -> "SeqForm":
        """alpha * f(n) + t."""
        return self * Fraction(alpha) + SeqForm.const(t)

    def reciprocal_term(self) -> Optional["SeqForm"]:
        """1/f when f is a single term; None otherwise."""
        if len(self.terms) != 1:
            return None
        ((rho, k), c), = self.terms.items()
        if c == 0:
            return None
        return SeqForm({(1 / rho, -k): 1 / c})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SeqForm):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # -- evaluation ---------------------------------------------------------

    def min_valid_index(self) -> int:
        return 1 if any(k < 0 for (_, k) in self.terms) else 0

    def max_cheap_index(self) -> int:
        """Largest index where exact evaluation stays under ~40k bits."""
        cap = 1 << 60
        for (rho, _k), _c in self.terms.items():
            if rho > 1:
                cap = min(cap, int(40000 / math.log2(float(rho))) - 1)
        return cap

    def evaluate(self, n: int) -> Fraction:
        if n < self.min_valid_index():
            raise ValueError(f"form has negative powers; undefined at n={n}")
        total = Fraction(0)
        nf = Fraction(n)
        for (rho, k), c in self.terms.items():
            if k == 0:
                total += c * rho**n
            elif n == 0:
                continue  # 0**k == 0 for k > 0; k < 0 excluded above
            else:
                total += c * rho**n * nf**k
        return total

    def evaluate_float(self, n: int) -> float:
        """Float evaluation; exponentials may underflow to 0.0 harmlessly."""
        total = 0.0
        for (rho, k), c in self.terms.items():
            if n == 0 and k != 0:
                continue
            try:
                total += float(c) * float(rho) ** n * float(n) ** k
            except OverflowError:
                total += math.inf if c > 0 else -math.inf
        return total

    def evaluate_lossy(self, n: int) -> Tuple[Fraction, float]:
        """Exact value of the representable part plus an error bound.

        Geometric terms whose magnitude at ``n`` falls below 2**-2000 are
        dropped (their exact denominators would need ~n bits); the returned
        bound covers everything dropped.  Exact (bound 0.0) whenever the
        index is small enough, which covers all semantically sharp uses.
        """
        if n < self.min_valid_index():
            raise ValueError(f"form has negative powers; undefined at n={n}")
        total = Fraction(0)
        err = 0.0
        nf = Fraction(n)
        for (rho, k), c in self.terms.items():
            if n == 0 and k != 0:
                continue
            if rho != 1:
                log2_mag = (
                    math.log2(abs(float(c)) if c else 1.0)
                    + n * math.log2(float(rho))
                    + k * math.log2(max(n, 1))
                )
                if log2_mag < -2000:
                    err += 1e-300
                    continue
                if log2_mag > 40000:
                    raise SeriesCapExceeded(
                        f"term {c}*{rho}^n*n^{k} too large to evaluate at n={n}"
                    )
            total += c * rho**n * (nf**k if k else 1)
        return total, err

    def limit(self) -> ExtReal:
        """lim_{n -> inf} f(n) on the extended line (always exists here)."""
        divergent = [
            ((rho, k), c)
            for (rho, k), c in self.terms.items()
            if rho > 1 or (rho == 1 and k > 0)
        ]
        if divergent:
            (_, _), c = max(divergent, key=lambda item: item[0])
            return POS_INF if c > 0 else NEG_INF
        return ExtReal(self.terms.get((Fraction(1), 0), Fraction(0)))

    def eventually_monotone_direction(self) -> int:
        """+1 if f is eventually strictly increasing, -1 decreasing, 0 constant."""
        diff_limit_sign = self._difference_sign()
        return diff_limit_sign

    def _difference_sign(self) -> int:
        # Sign of f(n+1) - f(n) for large n, by dominant-term analysis on
        # sampled exact values (forms here are eventually monotone).
        lo = max(self.min_valid_index(), 1)
        samples = [lo + (1 << j) for j in range(8, 22, 2)]
        vals = [self.evaluate(n) for n in samples]
        diffs = [b - a for a, b in zip(vals, vals[1:])]
        if all(d > 0 for d in diffs):
            return 1
        if all(d < 0 for d in diffs):
            return -1
        if all(d == 0 for d in diffs):
            return 0
        raise ValueError("sequence is not eventually monotone on samples")

    # -- series ---------------------------------------------------------

    def _classify_divergent(self) -> int:
        """0 if the tail series converges, else the sign of its divergence."""
        divergent = [
            ((rho, k), c)
            for (rho, k), c in self.terms.items()
            if rho > 1 or (rho == 1 and k >= -1)
        ]
        if not divergent:
            return 0
        (_, _), c = max(divergent, key=lambda item: item[0])
        return 1 if c > 0 else -1

    def tail_sum(self, m: int, rel_tol: Fraction = _REL_TOL) -> SeriesSum:
        """sum_{n >= m} f(n), exact when possible, else bounded numeric."""
        m = max(m, self.min_valid_index(), 0)
        sign = self._classify_divergent()
        if sign:
            return SeriesSum(Fraction(0), 0.0, sign)
        exact_total = Fraction(0)
        num_total = 0.0
        num_err = 0.0
        have_numeric = False
        lossy_err = 0.0
        for (rho, k), c in self.terms.items():
            if k >= 0:
                if rho == 1:
                    # convergent with rho == 1 requires k <= -2; k >= 0 terms
                    # here can only be the zero form (filtered already)
                    raise AssertionError("unreachable: divergent term slipped through")
                val, e = self._geom_tail(rho, k, m)
                exact_total += c * val
                lossy_err += abs(float(c)) * e
            else:
                val, err = self._numeric_tail(rho, k, m, rel_tol)
                num_total += float(c) * val
                num_err += abs(float(c)) * err
                have_numeric = True
        if not have_numeric:
            return SeriesSum(exact_total, lossy_err)
        return SeriesSum(
            float(exact_total) + num_total,
            num_err + lossy_err + 1e-15 * abs(num_total),
        )

    @staticmethod
    def _geom_tail(rho: Fraction, k: int, m: int) -> Tuple[Fraction, float]:
        """sum_{n>=m} n**k rho**n (rho < 1, k >= 0), exact or tiny-with-bound."""
        log2_mag = m * math.log2(float(rho)) + k * math.log2(max(m, 2)) + 4
        if log2_mag < -2000:
            return Fraction(0), 1e-300
        c0, pcoeffs = _geom_poly_closed_form(rho, k)
        prefix = geom_poly_prefix(rho, k, m - 1)
        return c0 - prefix, 0.0

    @staticmethod
    def _numeric_tail(rho: Fraction, k: int, m: int, rel_tol: Fraction) -> Tuple[float, float]:
        """Bounded numeric tail for a single term with k < 0."""
        rho_f = float(rho)
        if rho == 1:
            # k <= -2: partial sum to a cutoff, then Euler-Maclaurin tail
            # sum_{n>=N} n**k = -N**(k+1)/(k+1) + N**k/2 - k*N**(k-1)/12 + err
            cutoff = max(m, 8192)
            partial = math.fsum(float(n) ** k for n in range(m, cutoff))
            x = float(cutoff)
            em = -(x ** (k + 1)) / (k + 1) + 0.5 * x**k - (k / 12.0) * x ** (k - 1)
            err = abs(k * (k - 1) * (k - 2)) * x ** (k - 3) / 720.0 + 1e-14 * abs(partial)
            return partial + em, err
        # rho < 1: ratio t(n+1)/t(n) <= rho, geometric-tail bound
        acc = 0.0
        n = m
        while True:
            t = rho_f**n * n**k
            bound = t * rho_f / (1.0 - rho_f)
            if bound <= float(rel_tol) * max(abs(acc), 1e-30) or t == 0.0:
                return acc + t, bound + 1e-15 * abs(acc)
            acc += t
            n += 1
            if n - m > _MAX_TERMS:
                raise SeriesCapExceeded("term cap exceeded without a certified bound")

    def range_sum(self, m: int, m_hi: int) -> SeriesSum:
        """sum for n = m..m_hi inclusive; exact where the algebra allows."""
        if m_hi < m:
            return SeriesSum(Fraction(0), 0.0)
        m = max(m, self.min_valid_index())
        if m_hi - m <= 512:
            total = Fraction(0)
            for n in range(m, m_hi + 1):
                total += self.evaluate(n)
            return SeriesSum(total, 0.0)
        exact_total = Fraction(0)
        num_total = 0.0
        num_err = 0.0
        have_numeric = False
        lossy_err = 0.0
        for (rho, k), c in self.terms.items():
            if rho == 1 and k >= 0:
                exact_total += c * (faulhaber(k, m_hi) - faulhaber(k, m - 1))
            elif rho != 1 and k >= 0:
                if rho > 1:
                    if (m_hi + 1) * math.log2(float(rho)) > 40000:
                        raise SeriesCapExceeded(
                            "growing geometric term over an astronomically large range"
                        )
                    exact_total += c * (
                        geom_poly_prefix(rho, k, m_hi) - geom_poly_prefix(rho, k, m - 1)
                    )
                else:
                    lo_t, e1 = self._geom_tail(rho, k, m)
                    hi_t, e2 = self._geom_tail(rho, k, m_hi + 1)
                    exact_total += c * (lo_t - hi_t)
                    lossy_err += abs(float(c)) * (e1 + e2)
            elif rho < 1:  # k < 0, convergent tail
                sub = SeqForm.term(c, rho, k)
                part = sub.tail_sum(m) + (-sub).tail_sum(m_hi + 1)
                if part.exact:
                    exact_total += part.value
                else:
                    num_total += float(part.value)
                    num_err += part.err
                    have_numeric = True
            elif rho == 1 and k == -1:
                val, err = _harmonic_range(m, m_hi)
                num_total += float(c) * val
                num_err += abs(float(c)) * err
                have_numeric = True
            elif rho == 1:  # k <= -2
                sub = SeqForm.term(Fraction(1), rho, k)
                lo_tail, lo_err = sub._numeric_tail(rho, k, m, _REL_TOL)
                hi_tail, hi_err = sub._numeric_tail(rho, k, m_hi + 1, _REL_TOL)
                num_total += float(c) * (lo_tail - hi_tail)
                num_err += abs(float(c)) * (lo_err + hi_err)
                have_numeric = True
            else:  # rho > 1, k < 0: no closed form; explicit loop with cap
                if m_hi - m > _MAX_TERMS:
                    raise SeriesCapExceeded(
                        "rho>1 term with negative power over a huge index range"
                    )
                total = Fraction(0)
                for n in range(m, m_hi + 1):
                    total += c * rho**n * Fraction(n) ** k
                exact_total += total
        if not have_numeric:
            return SeriesSum(exact_total, lossy_err)
        return SeriesSum(float(exact_total) + num_total, num_err + lossy_err)

    # -- formatting -----------------------------------------------------

    def __repr__(self) -> str:
        return f"SeqForm({self.to_text()})"

    def to_text(self) -> str:
        """DSL-parseable rendering, e.g. ``2^-n * n^2`` or ``3 + 1/2*n``."""
        if not self.terms:
            return "0"
        parts = []
        for (rho, k), c in sorted(self.terms.items()):
            pieces = []
            if rho != 1:
                if rho.numerator == 1 and rho.denominator > 1:
                    pieces.append(f"{rho.denominator}^-n")
                else:
                    base = str(rho) if rho.denominator == 1 else f"({rho})"
                    pieces.append(f"{base}^n")
            if k == 1:
                pieces.append("n")
            elif k != 0:
                pieces.append(f"n^{k}")
            if not pieces or c != 1:
                coef = str(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
                pieces.insert(0, coef)
            parts.append("*".join(pieces))
        return " + ".join(parts).replace("+ -", "- ")


def seq_const(c) -> SeqForm:
    return SeqForm.const(c)


def seq_n() -> SeqForm:
    return SeqForm.var()


def seq_geom(c, rho) -> SeqForm:
    return SeqForm.term(c, rho, 0)
