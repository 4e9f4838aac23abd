from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gfib import config
from gfib.closedform import (
    approx_value,
    check_error_bound,
    error_term,
    fib_closed,
    required_precision,
    theorem_bound,
)
from gfib.errors import PrecisionCeilingError
from gfib.exact import fib_at
from gfib.interval import Verdict
from gfib.roots import solve_q

# c_3 q^-(n-1) for n = 0..10, truncated to two places as printed in the paper
PAPER_APPROX = ["0.33", "0.61", "1.13", "2.09", "3.84", "7.07", "13.01", "23.94", "44.03", "80.99", "148.98"]
# the same quantities to 10 significant digits from mpmath at 60 digits
MPMATH_APPROX = [
    0.336228117, 0.6184199223, 1.137451572, 2.092099612, 3.847971106, 7.07752229,
    13.01759301, 23.9430864, 44.0382017, 80.99888111, 148.9801692,
]
Q3 = Fraction("0.543689012692076361570855971801747986525203297650983935240804")


def truncate2(x: Fraction) -> str:
    units = int(x * 100)
    return f"{units // 100}.{units % 100:02d}"


def test_tribonacci_approximations_match_paper():
    values = [approx_value(3, n) for n in range(11)]
    assert [truncate2(v.mid) for v in values] == PAPER_APPROX
    for v, ref in zip(values, MPMATH_APPROX):
        assert abs(float(v) - ref) < 1e-9 * ref


def test_approx_is_an_enclosure():
    lo = approx_value(3, 10, 64)
    hi = approx_value(3, 10, 256)
    assert lo.intersects(hi) and hi.width < lo.width


@pytest.mark.parametrize("d,n,expected", [(3, 10, 149), (3, 6, 13), (2, 50, 12586269025), (5, 1, 1)])
def test_fib_closed_examples(d, n, expected):
    v = fib_closed(d, n)
    assert v.certified and v.rounded == expected


def test_fib_closed_nonpositive_needs_no_root():
    v = fib_closed(4, -3)
    assert v.rounded == 0 and v.certified and v.approx is None


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.integers(-5, 3000))
def test_fib_closed_matches_exact(d, n):
    assert fib_closed(d, n).rounded == fib_at(d, n)


def test_large_index():
    assert fib_closed(3, 20000).rounded == fib_at(3, 20000)


def test_precision_ceiling(monkeypatch):
    monkeypatch.setenv(config.PRECISION_ENV_VAR, "200")
    with pytest.raises(PrecisionCeilingError):
        fib_closed(3, 1000)


def test_required_precision():
    assert required_precision(3, 1) == 33
    assert required_precision(3, 100) == 88 + 32
    steps = [required_precision(5, n) for n in range(1, 300)]
    assert steps == sorted(steps)
    with pytest.raises(ValueError):
        required_precision(3, 0)


def test_error_term_examples():
    rec = error_term(3, 10)
    assert abs(float(rec.x_n) - (149 - 148.9801692)) < 1e-7
    assert rec.within_bound() is Verdict.HOLDS
    assert abs(error_term(3, 1).bound.mid - (1 - Q3)) < Fraction(1, 2**100)
    assert abs(float(error_term(2, 1).x_n) - 0.27639320225) < 1e-10


def test_error_term_nonpositive_index_uses_half_cap():
    rec = error_term(3, 0)
    assert rec.bound.mid == Fraction(1, 2) and rec.bound.width == 0
    assert rec.below_half() is Verdict.HOLDS


@pytest.mark.parametrize("d", range(2, 9))
def test_bound_strictly_decreasing(d):
    enc = solve_q(d)
    bounds = [theorem_bound(enc, n, 128) for n in range(1, 80)]
    assert all(b.lt(a) is Verdict.HOLDS for a, b in zip(bounds, bounds[1:]))
    assert bounds[0].upper < Fraction(1, 2)


@pytest.mark.parametrize("d", [2, 3, 6])
def test_error_dominated_by_bound(d):
    for n in range(-10, 60):
        _, within, half = check_error_bound(d, n)
        assert within is Verdict.HOLDS and half is Verdict.HOLDS
