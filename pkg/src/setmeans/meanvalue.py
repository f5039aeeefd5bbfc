"""The result type shared by measures and means.

A mean evaluation lands in exactly one of five cases: a finite value, one of
the two infinities, Divergent (the defining limit exists along no common
value even though the input is in the mean's domain), or Undefined (the
input is outside the domain).  Keeping Divergent and Undefined apart is what
lets the extension/limit machinery reason about existence of limits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .extreal import ExtReal, NEG_INF, POS_INF

FINITE = "finite"
PLUS_INF = "+inf"
MINUS_INF = "-inf"
DIVERGENT = "divergent"
UNDEFINED = "undefined"


@dataclass(frozen=True)
class MeanValue:
    kind: str
    value: Optional[Union[Fraction, float]] = None
    note: str = ""

    def __post_init__(self):
        if self.kind == FINITE:
            if self.value is None:
                raise ValueError("finite MeanValue needs a value")
        elif self.kind not in (PLUS_INF, MINUS_INF, DIVERGENT, UNDEFINED):
            raise ValueError(f"unknown MeanValue kind {self.kind!r}")

    # -- constructors -----------------------------------------------------

    @staticmethod
    def finite(value: Union[int, float, Fraction], note: str = "") -> "MeanValue":
        if isinstance(value, int):
            value = Fraction(value)
        return MeanValue(FINITE, value, note)

    @staticmethod
    def plus_inf(note: str = "") -> "MeanValue":
        return MeanValue(PLUS_INF, None, note)

    @staticmethod
    def minus_inf(note: str = "") -> "MeanValue":
        return MeanValue(MINUS_INF, None, note)

    @staticmethod
    def divergent(note: str = "") -> "MeanValue":
        return MeanValue(DIVERGENT, None, note)

    @staticmethod
    def undefined(note: str = "") -> "MeanValue":
        return MeanValue(UNDEFINED, None, note)

    @staticmethod
    def from_extreal(x: ExtReal, note: str = "") -> "MeanValue":
        if x.is_pos_inf:
            return MeanValue.plus_inf(note)
        if x.is_neg_inf:
            return MeanValue.minus_inf(note)
        return MeanValue.finite(x.finite, note)

    # -- predicates -------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.kind == FINITE

    @property
    def is_infinite(self) -> bool:
        return self.kind in (PLUS_INF, MINUS_INF)

    @property
    def is_defined(self) -> bool:
        return self.kind not in (DIVERGENT, UNDEFINED)

    def as_extreal(self) -> ExtReal:
        if self.kind == FINITE:
            return ExtReal.of(self.value) if not isinstance(self.value, float) else ExtReal(self.value)
        if self.kind == PLUS_INF:
            return POS_INF
        if self.kind == MINUS_INF:
            return NEG_INF
        raise ValueError(f"{self} has no extended-real value")

    def as_float(self) -> float:
        return self.as_extreal().as_float()

    # -- comparisons --------------------------------------------------------

    def approx_eq(self, other: "MeanValue", tol: float = 1e-9) -> bool:
        if self.kind != other.kind:
            return False
        if self.kind != FINITE:
            return True
        return abs(float(self.value) - float(other.value)) <= tol

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MeanValue):
            return NotImplemented
        if self.kind != other.kind:
            return False
        if self.kind != FINITE:
            return True
        return self.value == other.value

    def __hash__(self) -> int:
        return hash((self.kind, self.value))

    def __repr__(self) -> str:
        if self.kind == FINITE:
            return f"MeanValue({self.value})"
        return f"MeanValue({self.kind})"

    def pretty(self) -> str:
        if self.kind == FINITE:
            v = self.value
            if isinstance(v, Fraction):
                if v.denominator == 1:
                    return str(v.numerator)
                if v.denominator <= 10**6 and abs(v.numerator) <= 10**9:
                    return str(v)
                return f"{float(v):.12g}"
            return f"{v:.12g}"
        if self.kind == PLUS_INF:
            return "+inf"
        if self.kind == MINUS_INF:
            return "-inf"
        base = self.kind
        return f"{base} ({self.note})" if self.note else base
