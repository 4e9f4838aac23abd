"""Invariant suites run by ``gfib verify``.

Each check returns a :class:`CheckResult`; a check passes only when every
comparison in it is decided in its favour (undecided counts as failure).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

from .closedform import check_error_bound, fib_closed, theorem_bound
from .combinatorics import composition_log_probability, count_compositions, enumerate_compositions
from .exact import fib_at, fib_sequence
from .interval import Verdict
from .renewal import (
    blackwell_rate_check,
    build_distribution,
    nbu_check,
    proposition_value,
    renewal_mass_dp,
    simulate_first_passage,
)
from .roots import (
    blackwell_constant,
    characteristic_residual,
    mean_lifetime,
    pmf_total,
    solve_q,
)


@dataclass
class CheckResult:
    module: str
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


@dataclass
class Ranges:
    roots_d: range = range(2, 17)
    exact_d: range = range(2, 9)
    exact_n: int = 512
    closed_d: range = range(2, 9)
    closed_n: int = 1000
    bound_n: int = 200
    comb_d: range = range(2, 6)
    comb_n: int = 20
    renewal_d: range = range(2, 7)
    renewal_k: int = 200
    nbu_d: range = range(2, 9)
    mc_seeds: int = 20
    mc_reps: int = 100_000


FULL = Ranges()
QUICK = Ranges(
    roots_d=range(2, 9),
    exact_n=128,
    closed_d=range(2, 6),
    closed_n=150,
    bound_n=60,
    comb_d=range(2, 4),
    comb_n=14,
    renewal_k=60,
    mc_seeds=20,
    mc_reps=20_000,
)


def _collect(failures: list, limit: int = 3) -> str:
    if not failures:
        return "ok"
    shown = ", ".join(map(str, failures[:limit]))
    return f"{len(failures)} failures, e.g. {shown}"


# roots ---------------------------------------------------------------------


def check_root_brackets(r: Ranges) -> tuple[bool, str]:
    bad = [d for d in r.roots_d if not solve_q(d).is_certified()]
    return not bad, _collect(bad)


def check_root_monotone(r: Ranges) -> tuple[bool, str]:
    ds = list(r.roots_d)
    bad = [d for d in ds[:-1] if not solve_q(d + 1).q_hi < solve_q(d).q_lo]
    return not bad, _collect(bad)


def check_pmf_normalization(r: Ranges) -> tuple[bool, str]:
    bad = [d for d in r.roots_d if not pmf_total(solve_q(d)).contains(1)]
    return not bad, _collect(bad)


def check_mean_over_q(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.roots_d:
        enc = solve_q(d)
        ratio = mean_lifetime(enc) / enc.interval()
        if ratio.lower <= 2:
            bad.append(d)
    return not bad, _collect(bad)


def check_constant_agreement(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.roots_d:
        enc = solve_q(d)
        a = blackwell_constant(enc, "reciprocal_mean")
        b = blackwell_constant(enc, "closed_form")
        if not a.intersects(b) or not characteristic_residual(enc).contains(0):
            bad.append(d)
    return not bad, _collect(bad)


# exact ---------------------------------------------------------------------


def check_cross_method(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.exact_d:
        seq = fib_sequence(d, r.exact_n)
        bad += [(d, n) for n in range(r.exact_n + 1) if fib_at(d, n) != seq[n]]
    return not bad, _collect(bad)


def check_recursion_closure(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.exact_d:
        seq = fib_sequence(d, r.exact_n)
        for n in range(2, r.exact_n + 1):
            if seq[n] != sum(seq[n - i] for i in range(1, d + 1)):
                bad.append((d, n))
    return not bad, _collect(bad)


def check_monotone_growth(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.exact_d:
        v = fib_sequence(d, r.exact_n).values
        bad += [(d, n) for n in range(1, r.exact_n) if v[n + 1] < v[n]]
        bad += [(d, n) for n in range(2, r.exact_n) if v[n + 1] <= v[n]]
    return not bad, _collect(bad)


# closedform ------------------------------------------------------------------


def check_oracle_equivalence(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.closed_d:
        seq = fib_sequence(d, r.closed_n)
        for n in range(1, r.closed_n + 1):
            v = fib_closed(d, n)
            if not v.certified or v.rounded != seq[n]:
                bad.append((d, n))
    return not bad, _collect(bad)


def check_error_envelope(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.closed_d:
        for n in list(range(-10, 1)) + list(range(1, r.bound_n + 1)):
            _, within, half = check_error_bound(d, n)
            if within is not Verdict.HOLDS or half is not Verdict.HOLDS:
                bad.append((d, n, within.value, half.value))
    return not bad, _collect(bad)


def check_bound_decay(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.closed_d:
        enc = solve_q(d)
        prev = theorem_bound(enc, 1, 128)
        for n in range(2, r.bound_n + 1):
            cur = theorem_bound(enc, n, 128)
            if not cur.lt(prev):
                bad.append((d, n))
            prev = cur
    return not bad, _collect(bad)


# combinatorics -------------------------------------------------------------


def check_lemma1(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.comb_d:
        for n in range(r.comb_n + 1):
            listed = len(enumerate_compositions(d, n))
            if not listed == count_compositions(d, n) == fib_at(d, n + 1):
                bad.append((d, n))
    return not bad, _collect(bad)


def check_shape_independence(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.comb_d:
        enc = solve_q(d)
        for n in range(0, min(r.comb_n, 10) + 1):
            logs = {
                (c.lo, c.hi)
                for c in (composition_log_probability(d, comp, enc) for comp in enumerate_compositions(d, n))
            }
            if len(logs) > 1:
                bad.append((d, n))
    return not bad, _collect(bad)


def check_mass_bridge(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.comb_d:
        dist = build_distribution(solve_q(d))
        mass = renewal_mass_dp(dist, r.comb_n)
        for n in range(r.comb_n + 1):
            total = len(enumerate_compositions(d, n)) * dist.q**n
            if not total.intersects(mass[n]):
                bad.append((d, n))
    return not bad, _collect(bad)


# renewal -------------------------------------------------------------------


def check_proposition(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.renewal_d:
        dist = build_distribution(solve_q(d))
        mass = renewal_mass_dp(dist, r.renewal_k)
        bad += [(d, k) for k in range(r.renewal_k + 1) if not mass[k].intersects(proposition_value(dist, k))]
    return not bad, _collect(bad)


def check_blackwell_rate(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.renewal_d:
        enc = solve_q(d, 512)
        dist = build_distribution(enc)
        mass = renewal_mass_dp(dist, r.renewal_k)
        c = blackwell_constant(enc)
        for n in range(1, r.renewal_k + 1):
            v = blackwell_rate_check(dist, mass, c, n)
            if v is not Verdict.HOLDS:
                bad.append((d, n, v.value))
    return not bad, _collect(bad)


def check_nbu(r: Ranges) -> tuple[bool, str]:
    bad = []
    for d in r.nbu_d:
        dist = build_distribution(solve_q(d))
        bad += [(d, i, j) for i in range(d) for j in range(d + 1) if nbu_check(dist, i, j) is not Verdict.HOLDS]
    return not bad, _collect(bad)


def check_monte_carlo(r: Ranges) -> tuple[bool, str]:
    dist = build_distribution(solve_q(3))
    exact = float(proposition_value(dist, 10).mid)
    covered = sum(simulate_first_passage(dist, 10, r.mc_reps, seed).covers(exact) for seed in range(r.mc_seeds))
    needed = -(-17 * r.mc_seeds // 20)
    return covered >= needed, f"{covered}/{r.mc_seeds} intervals cover {exact:.6f}"


def check_determinism(r: Ranges) -> tuple[bool, str]:
    dist = build_distribution(solve_q(3))
    a = simulate_first_passage(dist, 10, 50_000, 1234, block_size=4096)
    b = simulate_first_passage(dist, 10, 50_000, 1234, block_size=4096, workers=4)
    return a == b, f"hits {a.hits} vs {b.hits}"


SUITES: dict[str, list[tuple[str, Callable[[Ranges], tuple[bool, str]]]]] = {
    "roots": [
        ("bracket (1/2, 1) with exact sign checks", check_root_brackets),
        ("q decreases in d", check_root_monotone),
        ("pmf sums to 1", check_pmf_normalization),
        ("E[X]/q > 2", check_mean_over_q),
        ("two formulas for c_d agree; residual contains 0", check_constant_agreement),
    ],
    "exact": [
        ("sliding window equals matrix power", check_cross_method),
        ("recursion closure", check_recursion_closure),
        ("monotone growth", check_monotone_growth),
    ],
    "closedform": [
        ("rounded closed form equals exact value", check_oracle_equivalence),
        ("|x_n| within geometric bound and below 1/2", check_error_envelope),
        ("bound strictly decreasing", check_bound_decay),
    ],
    "combinatorics": [
        ("composition count equals F_{n+1}", check_lemma1),
        ("composition probability independent of shape", check_shape_independence),
        ("sum over compositions equals renewal mass", check_mass_bridge),
    ],
    "renewal": [
        ("u_k equals q^k F_{k+1}", check_proposition),
        ("|u_{n-1} - c_d| <= (1-q)^n", check_blackwell_rate),
        ("new better than used", check_nbu),
        ("Monte Carlo 95% intervals cover exact value", check_monte_carlo),
        ("simulation independent of worker count", check_determinism),
    ],
}


def run_all(quick: bool = False) -> list[CheckResult]:
    ranges = QUICK if quick else FULL
    results = []
    for module, checks in SUITES.items():
        for name, fn in checks:
            start = time.perf_counter()
            try:
                passed, detail = fn(ranges)
            except Exception as exc:  # a crash is a failed check, not a crashed run
                passed, detail = False, f"{type(exc).__name__}: {exc}"
            results.append(CheckResult(module, name, passed, detail, time.perf_counter() - start))
    return results
