"""Extended-real scalars: exact rationals together with -inf and +inf.

The finite payload is normally a ``fractions.Fraction`` so that set algebra
stays exact; evaluation results are allowed to carry floats.  Arithmetic
follows the usual conventions on the extended line: addition of opposite
infinities is an error rather than a silent nan.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]
Scalar = Union[int, float, Fraction]

_POS = 1
_NEG = -1
_FIN = 0


def _coerce(value: Scalar) -> Union[Fraction, float]:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if value != value:
            raise ValueError("nan is not an extended real")
        if value in (float("inf"), float("-inf")):
            raise ValueError("use ExtReal.pos_inf()/neg_inf() for infinities")
        return value
    raise TypeError(f"cannot make an ExtReal from {value!r}")


class ExtReal:
    """A point of the extended real line [-inf, +inf]."""

    __slots__ = ("_sign", "_value")

    def __init__(self, value: Scalar):
        self._sign = _FIN
        self._value: Union[Fraction, float] = _coerce(value)

    @classmethod
    def _make_inf(cls, sign: int) -> "ExtReal":
        obj = object.__new__(cls)
        obj._sign = sign
        obj._value = Fraction(0)
        return obj

    @classmethod
    def pos_inf(cls) -> "ExtReal":
        return _POS_INF

    @classmethod
    def neg_inf(cls) -> "ExtReal":
        return _NEG_INF

    @classmethod
    def of(cls, value: Union["ExtReal", Scalar]) -> "ExtReal":
        if isinstance(value, ExtReal):
            return value
        if isinstance(value, float):
            if value == float("inf"):
                return _POS_INF
            if value == float("-inf"):
                return _NEG_INF
        return cls(value)

    # -- predicates ---------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self._sign == _FIN

    @property
    def is_pos_inf(self) -> bool:
        return self._sign == _POS

    @property
    def is_neg_inf(self) -> bool:
        return self._sign == _NEG

    @property
    def finite(self) -> Union[Fraction, float]:
        """The finite payload; raises on infinities."""
        if self._sign != _FIN:
            raise ValueError(f"{self} is not finite")
        return self._value

    def as_float(self) -> float:
        if self._sign == _POS:
            return float("inf")
        if self._sign == _NEG:
            return float("-inf")
        return float(self._value)

    # -- ordering -----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, float, Fraction)):
            other = ExtReal.of(other)
        if not isinstance(other, ExtReal):
            return NotImplemented
        if self._sign != _FIN or other._sign != _FIN:
            return self._sign == other._sign
        return self._value == other._value

    def __lt__(self, other: Union["ExtReal", Scalar]) -> bool:
        other = ExtReal.of(other)
        if self._sign != _FIN or other._sign != _FIN:
            if self._sign == other._sign:
                return False
            return self._sign < other._sign
        return self._value < other._value

    def __le__(self, other: Union["ExtReal", Scalar]) -> bool:
        other = ExtReal.of(other)
        return self == other or self < other

    def __gt__(self, other: Union["ExtReal", Scalar]) -> bool:
        return ExtReal.of(other) < self

    def __ge__(self, other: Union["ExtReal", Scalar]) -> bool:
        other = ExtReal.of(other)
        return self == other or other < self

    def __hash__(self) -> int:
        if self._sign == _POS:
            return hash("extreal:+inf")
        if self._sign == _NEG:
            return hash("extreal:-inf")
        return hash(self._value)

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "ExtReal":
        if self._sign == _POS:
            return _NEG_INF
        if self._sign == _NEG:
            return _POS_INF
        return ExtReal(-self._value)

    def __add__(self, other: Union["ExtReal", Scalar]) -> "ExtReal":
        other = ExtReal.of(other)
        if self._sign == _FIN and other._sign == _FIN:
            return ExtReal(self._value + other._value)
        if self._sign == _FIN:
            return other
        if other._sign == _FIN:
            return self
        if self._sign == other._sign:
            return self
        raise ArithmeticError("(+inf) + (-inf) is undefined")

    __radd__ = __add__

    def __sub__(self, other: Union["ExtReal", Scalar]) -> "ExtReal":
        return self + (-ExtReal.of(other))

    def __mul__(self, other: Union["ExtReal", Scalar]) -> "ExtReal":
        other = ExtReal.of(other)
        if self._sign == _FIN and other._sign == _FIN:
            return ExtReal(self._value * other._value)
        a, b = self, other
        if a._sign == _FIN:
            a, b = b, a
        # a is infinite
        if b._sign == _FIN:
            if b._value == 0:
                raise ArithmeticError("0 * inf is undefined")
            return a if b._value > 0 else -a
        return _POS_INF if a._sign == b._sign else _NEG_INF

    __rmul__ = __mul__

    def __truediv__(self, other: Union["ExtReal", Scalar]) -> "ExtReal":
        other = ExtReal.of(other)
        if other._sign != _FIN:
            if self._sign != _FIN:
                raise ArithmeticError("inf / inf is undefined")
            return ExtReal(0)
        if other._value == 0:
            raise ZeroDivisionError("division by zero in ExtReal")
        if self._sign == _FIN:
            return ExtReal(self._value / other._value)
        return self if other._value > 0 else -self

    # -- misc ---------------------------------------------------------------

    def __repr__(self) -> str:
        if self._sign == _POS:
            return "+inf"
        if self._sign == _NEG:
            return "-inf"
        return str(self._value)

    def __bool__(self) -> bool:
        return self._sign != _FIN or self._value != 0


_POS_INF = ExtReal._make_inf(_POS)
_NEG_INF = ExtReal._make_inf(_NEG)

POS_INF = _POS_INF
NEG_INF = _NEG_INF


def ext_min(*values: ExtReal) -> ExtReal:
    result = values[0]
    for v in values[1:]:
        if v < result:
            result = v
    return result


def ext_max(*values: ExtReal) -> ExtReal:
    result = values[0]
    for v in values[1:]:
        if result < v:
            result = v
    return result


def frac(numerator: Union[int, str, Fraction], denominator: int = None) -> Fraction:
    """Shorthand Fraction constructor used throughout the package."""
    if denominator is None:
        return Fraction(numerator)
    return Fraction(numerator, denominator)
