from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from gfib.errors import PrecisionRefinementRequired
from gfib.interval import CertifiedReal, Verdict

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6)
precisions = st.integers(min_value=8, max_value=200)


@given(rationals, rationals, precisions)
def test_arithmetic_encloses_exact_result(a, b, prec):
    x, y = CertifiedReal.exact(a, prec), CertifiedReal.exact(b, prec)
    assert (x + y).contains(a + b)
    assert (x - y).contains(a - b)
    assert (x * y).contains(a * b)
    assert (-x).contains(-a)
    assert abs(x).contains(abs(a))
    if b != 0:
        assert (x / y).contains(a / b)


@given(rationals, st.integers(min_value=-12, max_value=12), precisions)
def test_integer_power_encloses(a, k, prec):
    if a == 0 and k < 0:
        return
    assert (CertifiedReal.exact(a, prec) ** k).contains(a**k)


@given(st.fractions(min_value=-5, max_value=5), st.fractions(min_value=-5, max_value=5), st.integers(1, 7))
def test_power_of_straddling_interval(lo, hi, k):
    lo, hi = min(lo, hi), max(lo, hi)
    x = CertifiedReal.from_bounds(lo, hi, 64)
    y = x**k
    for t in (lo, hi, (lo + hi) / 2, Fraction(0) if lo <= 0 <= hi else lo):
        assert y.contains(t**k)


def test_negation_keeps_full_precision():
    x = CertifiedReal.exact(Fraction(1, 3), 256)
    assert (-(-x)).lo == x.lo and (-(-x)).hi == x.hi
    assert x.width < Fraction(1, 2**250)


def test_exact_integers_stay_exact():
    x = CertifiedReal.exact(7, 64)
    assert x.width == 0 and x.mid == 7


def test_division_by_straddling_interval_asks_for_refinement():
    with pytest.raises(PrecisionRefinementRequired):
        CertifiedReal.exact(1, 64) / CertifiedReal.from_bounds(-1, 1, 64)
    with pytest.raises(ZeroDivisionError):
        CertifiedReal.exact(1, 64) / 0


def test_three_valued_comparison():
    a = CertifiedReal.from_bounds(0, 1, 32)
    assert a.le(2) is Verdict.HOLDS
    assert a.le(-1) is Verdict.FAILS
    assert a.le(Fraction(1, 2)) is Verdict.UNDECIDED
    assert not Verdict.UNDECIDED and not Verdict.FAILS and Verdict.HOLDS


@given(st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=1000))
def test_log_encloses(a):
    mp.mp.prec = 300
    exact = mp.log(mp.mpf(a.numerator) / a.denominator)
    y = CertifiedReal.exact(a, 80).log()
    assert mp.mpf(y.lower.numerator) / y.lower.denominator <= exact + mp.mpf(2) ** -250
    assert exact - mp.mpf(2) ** -250 <= mp.mpf(y.upper.numerator) / y.upper.denominator


def test_immutable():
    x = CertifiedReal.exact(1, 16)
    with pytest.raises(AttributeError):
        x.lo = 0
