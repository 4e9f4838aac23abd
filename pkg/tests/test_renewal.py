from fractions import Fraction
from itertools import product

import pytest

from gfib.exact import fib_at
from gfib.interval import Verdict
from gfib.renewal import (
    blackwell_rate_check,
    build_distribution,
    nbu_check,
    proposition_value,
    renewal_mass_dp,
    sampling_cdf,
    simulate_first_passage,
)
from gfib.roots import blackwell_constant, solve_q

# mpmath, 60 digits
Q3 = Fraction("0.543689012692076361570855971801747986525203297650983935240804")
U10_D3 = Fraction("0.618380986803213088939767490755280736464807048288565878761481")


@pytest.fixture(scope="module")
def dist3():
    return build_distribution(solve_q(3))


def landing_probability_oracle(d, q, n):
    """Sum q^(sum) over all part sequences landing exactly on n (brute force, floats)."""
    total = 0.0
    for m in range(n + 1):
        for parts in product(range(1, d + 1), repeat=m):
            if sum(parts) == n:
                total += q**n
    return total


def test_distribution_d2():
    dist = build_distribution(solve_q(2))
    assert abs(float(dist.pmf[0]) - 0.6180339887) < 1e-9
    assert abs(float(dist.pmf[1]) - 0.3819660113) < 1e-9
    assert dist.cdf[-1].contains(1)


def test_distribution_d3(dist3):
    for p, ref in zip(dist3.pmf, (0.5436890127, 0.2955977425, 0.1607132448)):
        assert abs(float(p) - ref) < 1e-9
        assert 0 < p.lower and p.upper < 1
    assert all(b.lower >= a.lower for a, b in zip(dist3.cdf, dist3.cdf[1:]))
    assert dist3.cdf[-1].contains(1)


def test_tail_is_exact_at_the_ends(dist3):
    assert dist3.tail(0).width == 0 and dist3.tail(0).mid == 1
    assert dist3.tail(3).mid == 0 and dist3.tail(7).width == 0
    assert dist3.tail(1).intersects(1 - dist3.pmf[0])


def test_renewal_mass_values(dist3):
    mass = renewal_mass_dp(dist3, 10)
    assert mass[0].width == 0 and mass[0].mid == 1
    assert mass[1].lo == dist3.q.lo and mass[1].hi == dist3.q.hi
    assert abs(mass[10].mid - U10_D3) < Fraction(1, 2**110)
    assert abs(mass[10].mid - Q3**10 * 274) < Fraction(1, 2**110)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_renewal_mass_against_brute_force(d):
    dist = build_distribution(solve_q(d))
    mass = renewal_mass_dp(dist, 12)
    q = float(dist.q)
    for n in range(13):
        assert abs(float(mass[n]) - landing_probability_oracle(d, q, n)) < 1e-12


@pytest.mark.parametrize("d", range(2, 7))
def test_proposition(d):
    dist = build_distribution(solve_q(d))
    mass = renewal_mass_dp(dist, 200)
    for k in range(201):
        assert mass[k].intersects(proposition_value(dist, k))
        assert 0 < mass[k].lower and mass[k].upper <= 1 + Fraction(1, 2**100)


def test_width_grows_at_most_linearly():
    dist = build_distribution(solve_q(3))
    mass = renewal_mass_dp(dist, 400)
    unit = mass[1].width
    assert all(mass[k].width <= 8 * (k + 1) * unit for k in range(1, 401))


def test_dp_length_limits(dist3):
    with pytest.raises(ValueError):
        renewal_mass_dp(dist3, -1)
    with pytest.raises(ValueError):
        renewal_mass_dp(dist3, 10**6 + 1)


@pytest.mark.parametrize("d", range(2, 9))
def test_nbu(d):
    dist = build_distribution(solve_q(d))
    for i in range(d):
        for j in range(d + 1):
            assert nbu_check(dist, i, j) is Verdict.HOLDS


def test_nbu_examples_and_errors():
    dist3 = build_distribution(solve_q(3))
    assert nbu_check(dist3, 0, 2) and nbu_check(dist3, 1, 3)
    dist4 = build_distribution(solve_q(4))
    assert nbu_check(dist4, 1, 1) is Verdict.HOLDS
    # the certified comparison itself, without the exact shortcuts
    assert dist4.tail(2).le(dist4.tail(1) * dist4.tail(1)) is Verdict.HOLDS
    with pytest.raises(ValueError):
        nbu_check(dist3, 3, 0)
    with pytest.raises(ValueError):
        nbu_check(dist3, -1, 0)


def test_blackwell_rate_examples(dist3):
    mass = renewal_mass_dp(dist3, 10)
    c = blackwell_constant(dist3.enclosure)
    assert blackwell_rate_check(dist3, mass, c, 1) is Verdict.HOLDS
    assert blackwell_rate_check(dist3, mass, c, 11) is Verdict.HOLDS
    gap = abs(mass[10] - c)
    assert abs(float(gap) - 3.89355e-5) < 1e-9
    dist2 = build_distribution(solve_q(2))
    assert blackwell_rate_check(dist2, renewal_mass_dp(dist2, 0), blackwell_constant(dist2.enclosure), 1)
    with pytest.raises(IndexError):
        blackwell_rate_check(dist3, mass, c, 12)


def test_blackwell_rate_undecided_is_not_false():
    dist = build_distribution(solve_q(2, 32), 32)
    mass = renewal_mass_dp(dist, 150)
    c = blackwell_constant(dist.enclosure)
    assert blackwell_rate_check(dist, mass, c, 150, max_doublings=0) is Verdict.UNDECIDED
    assert blackwell_rate_check(dist, mass, c, 150, max_doublings=4) is Verdict.HOLDS


@pytest.mark.parametrize("d", range(2, 7))
def test_blackwell_rate(d):
    enc = solve_q(d, 512)
    dist = build_distribution(enc)
    mass = renewal_mass_dp(dist, 200)
    c = blackwell_constant(enc)
    assert all(blackwell_rate_check(dist, mass, c, n) is Verdict.HOLDS for n in range(1, 201))


def test_sampling_cdf_is_normalised(dist3):
    cdf = sampling_cdf(dist3)
    assert cdf[-1] == 1.0 and all(cdf[:-1] < 1.0)


def test_simulation_small_cases():
    dist2 = build_distribution(solve_q(2))
    rep = simulate_first_passage(dist2, 1, 100_000, 42)
    assert abs(rep.estimate - float(dist2.q)) <= 3 * rep.std_error
    one = simulate_first_passage(dist2, 1, 1, 7)
    assert one.hits in (0, 1) and one.estimate in (0.0, 1.0)


def test_simulation_report_fields(dist3):
    rep = simulate_first_passage(dist3, 10, 30_000, 5)
    assert rep.estimate == rep.hits / rep.replications
    se = (rep.estimate * (1 - rep.estimate) / rep.replications) ** 0.5
    assert rep.std_error == pytest.approx(se)
    assert rep.ci95[1] - rep.estimate == pytest.approx(1.96 * se)


def test_simulation_is_deterministic(dist3):
    a = simulate_first_passage(dist3, 10, 70_000, 99, block_size=10_000)
    b = simulate_first_passage(dist3, 10, 70_000, 99, block_size=10_000, workers=3)
    c = simulate_first_passage(dist3, 10, 70_000, 100, block_size=10_000)
    assert a == b and a.hits != c.hits


def test_simulation_errors(dist3):
    with pytest.raises(ValueError):
        simulate_first_passage(dist3, 10, 0, 1)
    with pytest.raises(ValueError):
        simulate_first_passage(dist3, 0, 10, 1)
    with pytest.raises(ValueError):
        simulate_first_passage(dist3, 3, 10, -1)


def test_proposition_value_uses_fibonacci(dist3):
    assert fib_at(3, 11) == 274
    assert abs(proposition_value(dist3, 10).mid - U10_D3) < Fraction(1, 2**110)
