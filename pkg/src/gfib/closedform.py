"""Nearest-integer representation ``F_n = round(c_d * q**-(n-1))``.

The renewal approximation ``c_d q^{-(n-1)}`` is computed as a certified
interval and rounded only once the interval, widened by the geometric error
bound ``(1-q) ((1-q)/q)**(n-1)``, pins down a single integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import config
from .errors import CertificationError, PrecisionCeilingError, check_order
from .exact import fib_at
from .interval import CertifiedReal, Verdict
from .roots import RootEnclosure, blackwell_constant, solve_q

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ClosedFormValue:
    d: int
    n: int
    approx: CertifiedReal | None
    rounded: int
    certified: bool
    precision_bits: int


@dataclass(frozen=True)
class ErrorRecord:
    """``x_n = F_n - c_d q^{-(n-1)}`` next to its geometric bound."""

    d: int
    n: int
    x_n: CertifiedReal
    bound: CertifiedReal
    precision_bits: int

    def within_bound(self) -> Verdict:
        # the whole |x_n| enclosure must sit below the smallest admissible bound
        return abs(self.x_n).le(self.bound)

    def below_half(self) -> Verdict:
        return abs(self.x_n).lt(HALF)


def _check_precision(precision_bits: int) -> None:
    if precision_bits < config.MIN_PRECISION_BITS:
        raise ValueError(f"precision_bits must be >= {config.MIN_PRECISION_BITS}")
    ceiling = config.max_precision_bits()
    if precision_bits > ceiling:
        raise PrecisionCeilingError(precision_bits, ceiling, "closed-form evaluation")


def _root_for(d: int, n: int, precision_bits: int) -> RootEnclosure:
    # the q error is amplified by |n-1| in q**-(n-1); pay for it with extra root bits
    extra = abs(n - 1).bit_length() + 2
    return solve_q(d, min(precision_bits + extra, config.max_precision_bits()))


def approx_value(d: int, n: int, precision_bits: int = config.DEFAULT_PRECISION_BITS) -> CertifiedReal:
    """Enclosure of ``c_d * q**-(n-1)`` at ``precision_bits`` working bits."""
    check_order(d)
    _check_precision(precision_bits)
    enc = _root_for(d, n, precision_bits)
    q = enc.interval(precision_bits)
    c = blackwell_constant(enc, prec=precision_bits)
    return c * q ** (1 - n)


def theorem_bound(enclosure: RootEnclosure, n: int, precision_bits: int) -> CertifiedReal:
    """Enclosure of ``(1-q) ((1-q)/q)**(n-1)``, valid for ``n >= 1``."""
    q = enclosure.interval(precision_bits)
    one_minus = 1 - q
    return one_minus * (one_minus / q) ** (n - 1)


def required_precision(d: int, n: int) -> int:
    """Working bits for ``approx_value`` so that rounding can be certified at ``n``.

    ``ceil(n * log2(1/q_lo)) + GUARD_BITS``: the magnitude of the approximation
    in bits plus a fixed guard.
    """
    check_order(d)
    if n < 1:
        raise ValueError(f"required_precision is defined for n >= 1, got {n}")
    enc = solve_q(d, 64)
    inv_q = 1 / CertifiedReal.exact(enc.q_lo, 64)
    bits_per_step = inv_q.log2().upper
    return math.ceil(n * bits_per_step) + config.GUARD_BITS


def _unique_integer(approx: CertifiedReal, bound_hi: Fraction) -> int | None:
    lo, hi = approx.lower, approx.upper
    # closed window from the geometric bound
    first = math.ceil(lo - bound_hi)
    last = math.floor(hi + bound_hi)
    # open window from |x_n| < 1/2
    first = max(first, math.floor(lo - HALF) + 1)
    last = min(last, math.ceil(hi + HALF) - 1)
    if last < first:
        raise CertificationError(
            f"no integer lies within the error window around [{float(lo)}, {float(hi)}]"
        )
    return first if first == last else None


def fib_closed(d: int, n: int) -> ClosedFormValue:
    """``F_n`` as the nearest integer to ``c_d q^{-(n-1)}``, with certified rounding.

    Precision starts at :func:`required_precision` and doubles until the
    rounding is certain; :class:`PrecisionCeilingError` is raised if the
    configured ceiling is hit first.  Never returns an uncertified integer.
    """
    check_order(d)
    if n <= 0:
        return ClosedFormValue(d, n, None, 0, True, 0)
    ceiling = config.max_precision_bits()
    prec = max(required_precision(d, n), config.MIN_PRECISION_BITS)
    while True:
        if prec > ceiling:
            raise PrecisionCeilingError(prec, ceiling, f"certified rounding of F_{n} (d={d})")
        approx = approx_value(d, n, prec)
        enc = _root_for(d, n, prec)
        bound = theorem_bound(enc, n, prec)
        m = _unique_integer(approx, bound.upper)
        if m is not None:
            return ClosedFormValue(d, n, approx, m, True, prec)
        prec *= 2


def error_term(d: int, n: int, precision_bits: int = config.DEFAULT_PRECISION_BITS) -> ErrorRecord:
    """``x_n`` as an interval, with the geometric bound for ``n >= 1``.

    For ``n <= 0`` the bound field holds the constant 1/2; the geometric
    bound only covers positive indices.
    """
    check_order(d)
    _check_precision(precision_bits)
    approx = approx_value(d, n, precision_bits)
    x = fib_at(d, n) - approx
    if n >= 1:
        bound = theorem_bound(_root_for(d, n, precision_bits), n, precision_bits)
    else:
        bound = CertifiedReal.exact(HALF, precision_bits)
    return ErrorRecord(d, n, x, bound, precision_bits)


def check_error_bound(d: int, n: int, precision_bits: int | None = None) -> tuple[ErrorRecord, Verdict, Verdict]:
    """Decide ``|x_n| <= bound`` and ``|x_n| < 1/2``, doubling precision while undecided.

    Returns the last record and the two verdicts.  A verdict stays
    ``UNDECIDED`` only if the precision ceiling is reached.
    """
    if precision_bits is None:
        precision_bits = 2 * required_precision(d, n) if n >= 1 else config.DEFAULT_PRECISION_BITS
    ceiling = config.max_precision_bits()
    prec = min(precision_bits, ceiling)
    while True:
        rec = error_term(d, n, prec)
        within, half = rec.within_bound(), rec.below_half()
        if Verdict.UNDECIDED not in (within, half) or prec >= ceiling:
            return rec, within, half
        prec = min(2 * prec, ceiling)
