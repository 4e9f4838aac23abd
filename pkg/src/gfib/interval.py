"""Outward-rounded interval arithmetic on MPFR floats.

A :class:`CertifiedReal` is a closed interval ``[lo, hi]`` whose endpoints are
binary floats of ``prec`` bits.  Every operation rounds the lower endpoint
toward -inf and the upper endpoint toward +inf, using MPFR's correctly rounded
primitives, so the true real result is always enclosed.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from functools import lru_cache
from typing import Union

import gmpy2
from gmpy2 import mpfr

from .errors import PrecisionRefinementRequired

Number = Union[int, Fraction]


class Verdict(enum.Enum):
    """Outcome of a comparison between enclosures."""

    HOLDS = "holds"
    FAILS = "fails"
    UNDECIDED = "undecided"

    def __bool__(self) -> bool:
        return self is Verdict.HOLDS


@lru_cache(maxsize=None)
def _down(prec: int) -> gmpy2.context:
    return gmpy2.context(precision=prec, round=gmpy2.RoundDown)


@lru_cache(maxsize=None)
def _up(prec: int) -> gmpy2.context:
    return gmpy2.context(precision=prec, round=gmpy2.RoundUp)


def _exact(n: int) -> mpfr:
    # precision wide enough that the conversion is exact
    return mpfr(n, max(n.bit_length(), 2))


def _neg(x: mpfr) -> mpfr:
    # exact: the operator form would round to the global context precision
    return _down(max(x.precision, 2)).minus(x)


def round_down(x: Number, prec: int) -> mpfr:
    if isinstance(x, int):
        return _down(prec).plus(_exact(x))
    return _down(prec).div(_exact(x.numerator), _exact(x.denominator))


def round_up(x: Number, prec: int) -> mpfr:
    if isinstance(x, int):
        return _up(prec).plus(_exact(x))
    return _up(prec).div(_exact(x.numerator), _exact(x.denominator))


def to_fraction(x: mpfr) -> Fraction:
    num, den = x.as_integer_ratio()
    return Fraction(int(num), int(den))


class CertifiedReal:
    """Closed interval ``[lo, hi]`` guaranteed to contain some real number."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo: mpfr, hi: mpfr, prec: int):
        if not (lo <= hi):
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("CertifiedReal is immutable")

    # construction -----------------------------------------------------------

    @classmethod
    def exact(cls, x: Number, prec: int) -> "CertifiedReal":
        """Tightest enclosure of the rational ``x`` at ``prec`` bits."""
        return cls(round_down(x, prec), round_up(x, prec), prec)

    @classmethod
    def from_bounds(cls, lo: Number, hi: Number, prec: int) -> "CertifiedReal":
        return cls(round_down(lo, prec), round_up(hi, prec), prec)

    def _coerce(self, other) -> "CertifiedReal":
        if isinstance(other, CertifiedReal):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return CertifiedReal.exact(other, self.prec)
        return NotImplemented

    # arithmetic -------------------------------------------------------------

    def __neg__(self) -> "CertifiedReal":
        return CertifiedReal(_neg(self.hi), _neg(self.lo), self.prec)

    def __add__(self, other) -> "CertifiedReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = max(self.prec, other.prec)
        return CertifiedReal(_down(p).add(self.lo, other.lo), _up(p).add(self.hi, other.hi), p)

    __radd__ = __add__

    def __sub__(self, other) -> "CertifiedReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = max(self.prec, other.prec)
        return CertifiedReal(_down(p).sub(self.lo, other.hi), _up(p).sub(self.hi, other.lo), p)

    def __rsub__(self, other) -> "CertifiedReal":
        return (-self) + other

    def __mul__(self, other) -> "CertifiedReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = max(self.prec, other.prec)
        dn, up = _down(p), _up(p)
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        if a >= 0 and c >= 0:
            return CertifiedReal(dn.mul(a, c), up.mul(b, d), p)
        lows = [dn.mul(a, c), dn.mul(a, d), dn.mul(b, c), dn.mul(b, d)]
        highs = [up.mul(a, c), up.mul(a, d), up.mul(b, c), up.mul(b, d)]
        return CertifiedReal(min(lows), max(highs), p)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "CertifiedReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.lo <= 0 <= other.hi:
            if other.lo == 0 and other.hi == 0:
                raise ZeroDivisionError("division by the exact zero interval")
            raise PrecisionRefinementRequired(
                f"divisor interval [{other.lo}, {other.hi}] contains zero at {other.prec} bits"
            )
        p = max(self.prec, other.prec)
        dn, up = _down(p), _up(p)
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        lows = [dn.div(a, c), dn.div(a, d), dn.div(b, c), dn.div(b, d)]
        highs = [up.div(a, c), up.div(a, d), up.div(b, c), up.div(b, d)]
        return CertifiedReal(min(lows), max(highs), p)

    def __rtruediv__(self, other) -> "CertifiedReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int) -> "CertifiedReal":
        if not isinstance(k, int):
            return NotImplemented
        p = self.prec
        if k == 0:
            return CertifiedReal.exact(1, p)
        if k < 0:
            if self.lo > 0:
                # x -> x**k is decreasing on the positive axis
                return CertifiedReal(_down(p).pow(self.hi, k), _up(p).pow(self.lo, k), p)
            return CertifiedReal.exact(1, p) / (self ** (-k))
        if self.lo >= 0:
            return CertifiedReal(_down(p).pow(self.lo, k), _up(p).pow(self.hi, k), p)
        if self.hi <= 0:
            mag = (-self) ** k
            return mag if k % 2 == 0 else -mag
        if k % 2 == 1:
            return CertifiedReal(_neg(_up(p).pow(_neg(self.lo), k)), _up(p).pow(self.hi, k), p)
        top = max(_neg(self.lo), self.hi)
        return CertifiedReal(mpfr(0), _up(p).pow(top, k), p)

    def __abs__(self) -> "CertifiedReal":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return CertifiedReal(mpfr(0), max(_neg(self.lo), self.hi), self.prec)

    def log(self) -> "CertifiedReal":
        if self.lo <= 0:
            raise ValueError("log of an interval that is not strictly positive")
        p = self.prec
        return CertifiedReal(_down(p).log(self.lo), _up(p).log(self.hi), p)

    def log2(self) -> "CertifiedReal":
        if self.lo <= 0:
            raise ValueError("log2 of an interval that is not strictly positive")
        p = self.prec
        return CertifiedReal(_down(p).log2(self.lo), _up(p).log2(self.hi), p)

    def with_precision(self, prec: int) -> "CertifiedReal":
        """Re-round outward to ``prec`` bits (never tightens)."""
        return CertifiedReal(_down(prec).plus(self.lo), _up(prec).plus(self.hi), prec)

    # queries ----------------------------------------------------------------

    @property
    def lower(self) -> Fraction:
        return to_fraction(self.lo)

    @property
    def upper(self) -> Fraction:
        return to_fraction(self.hi)

    @property
    def mid(self) -> Fraction:
        """Exact midpoint (a dyadic rational)."""
        return (self.lower + self.upper) / 2

    @property
    def radius(self) -> Fraction:
        return (self.upper - self.lower) / 2

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, x: Union[Number, "CertifiedReal"]) -> bool:
        if isinstance(x, CertifiedReal):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lower <= x <= self.upper

    def intersects(self, other: "CertifiedReal") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def le(self, other: Union[Number, "CertifiedReal"]) -> Verdict:
        """Decide ``self <= other`` for every pair of enclosed points."""
        lo_o, hi_o = _bounds(other)
        if self.hi <= lo_o:
            return Verdict.HOLDS
        if self.lo > hi_o:
            return Verdict.FAILS
        return Verdict.UNDECIDED

    def lt(self, other: Union[Number, "CertifiedReal"]) -> Verdict:
        lo_o, hi_o = _bounds(other)
        if self.hi < lo_o:
            return Verdict.HOLDS
        if self.lo >= hi_o:
            return Verdict.FAILS
        return Verdict.UNDECIDED

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"CertifiedReal([{self.lo}, {self.hi}], prec={self.prec})"


def _bounds(x):
    if isinstance(x, CertifiedReal):
        return x.lo, x.hi
    x = gmpy2.mpq(Fraction(x))
    return x, x


def interval_sum(terms, prec: int) -> CertifiedReal:
    total = CertifiedReal.exact(0, prec)
    for t in terms:
        total = total + t
    return total
