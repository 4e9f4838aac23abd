"""Discrete renewal process with lifetimes ``P(X = i) = q**i``, ``i = 1..d``.

``u_k = P(S_{tau_k} = k)`` is the probability that the walk
``S_m = X_1 + ... + X_m`` (``S_0 = 0``) lands exactly on ``k``.  It is computed
exactly (as intervals) by the renewal equation and estimated by simulation.

Random numbers come from numpy's PCG64 generator.  A run with seed ``s`` is
split into blocks of ``block_size`` replications; block ``b`` draws from the
``b``-th child of ``numpy.random.SeedSequence(s)``.  Results therefore depend
only on ``(seed, replications, block_size)``, not on how blocks are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import config
from .exact import fib_at
from .interval import CertifiedReal, Verdict, interval_sum
from .roots import RootEnclosure, blackwell_constant, solve_q

DEFAULT_BLOCK_SIZE = 1 << 16
Z95 = 1.96


@dataclass(frozen=True)
class LifetimeDistribution:
    d: int
    enclosure: RootEnclosure
    pmf: tuple[CertifiedReal, ...]  # pmf[i-1] encloses q**i
    cdf: tuple[CertifiedReal, ...]
    prec: int

    def tail(self, t: int) -> CertifiedReal:
        """Enclosure of ``P(X > t)``; exact at ``t <= 0`` and ``t >= d``."""
        if t <= 0:
            return CertifiedReal.exact(1, self.prec)
        if t >= self.d:
            return CertifiedReal.exact(0, self.prec)
        return interval_sum(self.pmf[t:], self.prec)

    @property
    def q(self) -> CertifiedReal:
        return self.pmf[0]


@dataclass(frozen=True)
class RenewalMass:
    d: int
    values: tuple[CertifiedReal, ...]

    def __getitem__(self, k: int) -> CertifiedReal:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SimulationReport:
    d: int
    n: int
    replications: int
    seed: int
    hits: int
    estimate: float
    std_error: float
    ci95: tuple[float, float]
    block_size: int

    def covers(self, value: float) -> bool:
        return self.ci95[0] <= value <= self.ci95[1]


def build_distribution(enclosure: RootEnclosure, prec: int | None = None) -> LifetimeDistribution:
    prec = prec or enclosure.precision_bits
    q = enclosure.interval(prec)
    pmf = []
    power = q
    for _ in range(enclosure.d):
        pmf.append(power)
        power = power * q
    cdf = []
    running = CertifiedReal.exact(0, prec)
    for p in pmf:
        running = running + p
        cdf.append(running)
    return LifetimeDistribution(enclosure.d, enclosure, tuple(pmf), tuple(cdf), prec)


def renewal_mass_dp(dist: LifetimeDistribution, n_max: int) -> RenewalMass:
    """``u_0 .. u_{n_max}`` from ``u_0 = 1``, ``u_k = sum_{i=1}^{min(d,k)} p_i u_{k-i}``."""
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    if n_max > config.MAX_DP_LENGTH:
        raise ValueError(f"n_max={n_max} exceeds the limit of {config.MAX_DP_LENGTH}")
    u = [CertifiedReal.exact(1, dist.prec)]
    for k in range(1, n_max + 1):
        terms = (dist.pmf[i - 1] * u[k - i] for i in range(1, min(dist.d, k) + 1))
        u.append(interval_sum(terms, dist.prec))
    return RenewalMass(dist.d, tuple(u))


def proposition_value(dist: LifetimeDistribution, k: int) -> CertifiedReal:
    """Enclosure of ``q**k * F_{k+1}``, the closed form of ``u_k``."""
    return fib_at(dist.d, k + 1) * dist.q**k


def _simulate_block(cdf: np.ndarray, n: int, size: int, seed_seq: np.random.SeedSequence) -> int:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    pos = np.zeros(size, dtype=np.int64)
    live = np.arange(size)
    while live.size:
        steps = np.searchsorted(cdf, rng.random(live.size), side="right") + 1
        pos[live] += steps
        live = live[pos[live] < n]
    return int(np.count_nonzero(pos == n))


def sampling_cdf(dist: LifetimeDistribution) -> np.ndarray:
    """Float cdf from pmf midpoints, renormalised so the last entry is exactly 1."""
    p = np.array([float(x.mid) for x in dist.pmf])
    cdf = np.cumsum(p / p.sum())
    cdf[-1] = 1.0
    return cdf


def simulate_first_passage(
    dist: LifetimeDistribution,
    n: int,
    replications: int,
    seed: int,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> SimulationReport:
    """Monte Carlo estimate of ``P(S_{tau_n} = n)``.

    Each replication samples lifetimes by inverse cdf until the walk reaches
    or passes ``n`` and records whether it landed on ``n`` exactly.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if replications < 1:
        raise ValueError("replications must be >= 1")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    cdf = sampling_cdf(dist)
    n_blocks = -(-replications // block_size)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    sizes = [min(block_size, replications - b * block_size) for b in range(n_blocks)]
    jobs = list(zip(sizes, children))
    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(lambda job: _simulate_block(cdf, n, *job), jobs))
    else:
        hits = sum(_simulate_block(cdf, n, size, child) for size, child in jobs)
    est = hits / replications
    se = math.sqrt(est * (1 - est) / replications)
    return SimulationReport(
        d=dist.d,
        n=n,
        replications=replications,
        seed=seed,
        hits=hits,
        estimate=est,
        std_error=se,
        ci95=(est - Z95 * se, est + Z95 * se),
        block_size=block_size,
    )


def _nbu_verdict(dist: LifetimeDistribution, i: int, j: int) -> Verdict:
    return dist.tail(i + j).le(dist.tail(i) * dist.tail(j))


def nbu_check(dist: LifetimeDistribution, i: int, j: int) -> Verdict:
    """Certified test of ``P(X > i+j) <= P(X > i) P(X > j)`` (new better than used).

    Cases that hold with equality (``i == 0`` or ``j == 0``) or trivially
    (``i + j >= d``, empty left tail) are decided exactly.  Otherwise the
    interval comparison is retried once at twice the precision before
    reporting ``UNDECIDED``.
    """
    if i < 0 or j < 0:
        raise ValueError("i and j must be >= 0")
    if i >= dist.d:
        raise ValueError(f"P(X > {i}) = 0 for d={dist.d}; the conditional is undefined")
    if i == 0 or j == 0 or i + j >= dist.d:
        return Verdict.HOLDS
    verdict = _nbu_verdict(dist, i, j)
    if verdict is Verdict.UNDECIDED:
        finer = build_distribution(solve_q(dist.d, 2 * dist.prec), 2 * dist.prec)
        verdict = _nbu_verdict(finer, i, j)
    return verdict


def _rate_verdict(dist: LifetimeDistribution, mass: RenewalMass, c: CertifiedReal, n: int) -> Verdict:
    return abs(mass[n - 1] - c).le((1 - dist.q) ** n)


def blackwell_rate_check(
    dist: LifetimeDistribution,
    mass: RenewalMass,
    c: CertifiedReal,
    n: int,
    max_doublings: int = 1,
) -> Verdict:
    """Certified test of ``|u_{n-1} - c_d| <= (1 - q)**n``.

    If the comparison is undecided, everything is recomputed at doubled
    precision (at most ``max_doublings`` times) before giving up.
    """
    if not 1 <= n <= len(mass):
        raise IndexError(f"n={n} outside 1..{len(mass)}")
    verdict = _rate_verdict(dist, mass, c, n)
    prec = dist.prec
    for _ in range(max_doublings):
        if verdict is not Verdict.UNDECIDED:
            break
        prec *= 2
        if prec > config.max_precision_bits():
            break
        enc = solve_q(dist.d, prec)
        dist = build_distribution(enc, prec)
        mass = renewal_mass_dp(dist, n - 1)
        verdict = _rate_verdict(dist, mass, blackwell_constant(enc, prec=prec), n)
    return verdict


def exact_renewal_probability(d: int, n: int, prec: int = config.DEFAULT_PRECISION_BITS) -> Fraction:
    """Midpoint of the enclosure of ``q**n F_{n+1}`` (reference value for simulations)."""
    dist = build_distribution(solve_q(d, prec), prec)
    return proposition_value(dist, n).mid
