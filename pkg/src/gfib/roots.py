"""The root ``q`` of ``q + q**2 + ... + q**d = 1`` and the constants built on it.

Enclosures are dyadic cells ``[m / 2**p, (m + 1) / 2**p]``.  Membership of the
root in a cell is decided by exact integer sign tests, never by floating point.
Because ``q`` is irrational, the cell at each level ``p`` is unique, so
``solve_q`` returns the same answer no matter how it was found.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from . import config
from .errors import PrecisionCeilingError, PrecisionRefinementRequired, check_order
from .interval import CertifiedReal, interval_sum

# Above this level a Newton guess is tried before falling back to bisection.
_NEWTON_THRESHOLD = 192


def scaled_sign(d: int, m: int, k: int) -> int:
    """Sign of ``f(m / 2**k)`` where ``f(q) = q + ... + q**d - 1``.

    Evaluated as the integer ``2**(k*d) * f(m / 2**k)`` with Horner's scheme.
    """
    t = m
    for j in range(1, d):
        t = m * (t + (1 << (k * j)))
    s = t - (1 << (k * d))
    return (s > 0) - (s < 0)


@dataclass(frozen=True)
class RootEnclosure:
    """Certified bracket ``q_lo <= q <= q_hi`` with ``q_hi - q_lo == 2**-precision_bits``."""

    d: int
    numerator: int
    precision_bits: int

    @property
    def q_lo(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.precision_bits)

    @property
    def q_hi(self) -> Fraction:
        return Fraction(self.numerator + 1, 1 << self.precision_bits)

    @property
    def width(self) -> Fraction:
        return Fraction(1, 1 << self.precision_bits)

    def is_certified(self) -> bool:
        """Re-run the exact endpoint sign checks."""
        m, k = self.numerator, self.precision_bits
        return (
            Fraction(1, 2) < self.q_lo
            and self.q_hi < 1
            and scaled_sign(self.d, m, k) <= 0 <= scaled_sign(self.d, m + 1, k)
        )

    def interval(self, prec: int | None = None) -> CertifiedReal:
        """The bracket as a :class:`CertifiedReal` at ``prec`` working bits."""
        return CertifiedReal.from_bounds(self.q_lo, self.q_hi, prec or self.precision_bits)


_cache_lock = threading.Lock()
_finest: dict[int, RootEnclosure] = {}


def _bisect(d: int, m: int, k: int, target: int) -> tuple[int, int]:
    # invariant: f(m/2^k) < 0 < f((m+1)/2^k)
    while k < target:
        m, k = 2 * m, k + 1
        if scaled_sign(d, m + 1, k) < 0:
            m += 1
    return m, k


def _newton_guess(d: int, bits: int) -> int:
    """Numerator of a candidate level-``bits`` cell from Newton's method."""
    with gmpy2.context(precision=bits + 64):
        q = gmpy2.mpfr(0.5) + gmpy2.mpfr(2.0) ** -(d + 1)
        tol = gmpy2.mpfr(2) ** -(bits + 32)
        for _ in range(4 * bits.bit_length() + 20):
            f, fp, pw = gmpy2.mpfr(-1), gmpy2.mpfr(0), gmpy2.mpfr(1)
            for i in range(1, d + 1):
                fp += i * pw
                pw *= q
                f += pw
            step = f / fp
            q -= step
            if abs(step) < tol:
                break
        return int(gmpy2.floor(q * gmpy2.mpfr(2) ** bits))


def solve_q(d: int, precision_bits: int = config.DEFAULT_PRECISION_BITS) -> RootEnclosure:
    """Certified dyadic enclosure of the unique root of ``q + ... + q**d = 1`` in (1/2, 1)."""
    check_order(d)
    if precision_bits < config.MIN_PRECISION_BITS:
        raise ValueError(f"precision_bits must be >= {config.MIN_PRECISION_BITS}")
    ceiling = config.max_precision_bits()
    if precision_bits > ceiling:
        raise PrecisionCeilingError(precision_bits, ceiling, "root enclosure")

    with _cache_lock:
        best = _finest.get(d)
    if best is not None and best.precision_bits >= precision_bits:
        shift = best.precision_bits - precision_bits
        return RootEnclosure(d, best.numerator >> shift, precision_bits)

    m = None
    near = best is not None and precision_bits - best.precision_bits <= 64
    if precision_bits > _NEWTON_THRESHOLD and not near:
        guess = _newton_guess(d, precision_bits)
        if scaled_sign(d, guess, precision_bits) < 0 < scaled_sign(d, guess + 1, precision_bits):
            m = guess
    if m is None:
        if best is not None:
            m, k = best.numerator, best.precision_bits
        else:
            if not (scaled_sign(d, 1, 1) < 0 < scaled_sign(d, 2, 1)):
                raise ArithmeticError(f"root for d={d} is not bracketed by (1/2, 1)")
            m, k = 1, 1
        m, _ = _bisect(d, m, k, precision_bits)

    enc = RootEnclosure(d, m, precision_bits)
    if not enc.is_certified():
        raise ArithmeticError(f"root enclosure for d={d} failed its sign certificate")
    with _cache_lock:
        current = _finest.get(d)
        if current is None or current.precision_bits < precision_bits:
            _finest[d] = enc
    return enc


def _q(enclosure: RootEnclosure, prec: int | None) -> CertifiedReal:
    return enclosure.interval(prec)


def mean_lifetime(enclosure: RootEnclosure, prec: int | None = None) -> CertifiedReal:
    """Enclosure of ``E[X] = sum_{i=1}^d i * q**i``."""
    q = _q(enclosure, prec)
    return interval_sum((i * q**i for i in range(1, enclosure.d + 1)), q.prec)


def blackwell_constant(
    enclosure: RootEnclosure, method: str = "reciprocal_mean", prec: int | None = None
) -> CertifiedReal:
    """Enclosure of the renewal density limit ``c_d``.

    ``reciprocal_mean`` computes ``1 / E[X]``; ``closed_form`` evaluates
    ``(q - 1)**2 / (d q**(d+2) - (d+1) q**(d+1) + q)``.  The two share no
    intermediate results, so agreement of their enclosures is a real check.
    """
    if method == "reciprocal_mean":
        return 1 / mean_lifetime(enclosure, prec)
    if method == "closed_form":
        d = enclosure.d
        q = _q(enclosure, prec)
        den = d * q ** (d + 2) - (d + 1) * q ** (d + 1) + q
        if den.lo <= 0:
            raise PrecisionRefinementRequired(
                f"closed-form denominator for d={d} not separated from 0 at {q.prec} bits"
            )
        return (q - 1) ** 2 / den
    raise ValueError(f"unknown method {method!r}; use 'reciprocal_mean' or 'closed_form'")


def characteristic_residual(enclosure: RootEnclosure, prec: int | None = None) -> CertifiedReal:
    """Enclosure of ``x**d - x**(d-1) - ... - x - 1`` at ``x = 1/q``; must contain 0."""
    x = 1 / _q(enclosure, prec)
    d = enclosure.d
    return x**d - interval_sum((x**i for i in range(d)), x.prec)


def pmf_total(enclosure: RootEnclosure, prec: int | None = None) -> CertifiedReal:
    q = _q(enclosure, prec)
    return interval_sum((q**i for i in range(1, enclosure.d + 1)), q.prec)


@dataclass(frozen=True)
class DerivedConstants:
    mean_lifetime: CertifiedReal
    c_d: CertifiedReal


def derived_constants(enclosure: RootEnclosure) -> DerivedConstants:
    return DerivedConstants(mean_lifetime(enclosure), blackwell_constant(enclosure))
