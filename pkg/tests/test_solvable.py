import math

import mpmath
import numpy as np
import pytest

from ulamlab.core.errors import DomainError, InfeasibleTargetError, ResourceCapError
from ulamlab.core.solvable import (
    SQRT2, dilog, expect_N, f_m, f_m_integral, first_moment_ld, mc_N, partition_counts,
    partition_trend, poisson_ld, poisson_ld_check, replica_constrained_sum, replica_ratio,
    replica_to_zero, solve_z,
)


def test_expectation_edges():
    assert expect_N(5, 2, 0.0) == 0.0
    assert expect_N(5, 2, 1e9) == pytest.approx(10.0)
    assert expect_N(1, 1, 1.0) == pytest.approx(1 - math.exp(-1))
    with pytest.raises(DomainError):
        expect_N(3, 4, 1.0)


def test_monte_carlo_matches_expectation():
    mean, stderr = mc_N(10, 3, 1.5, samples=20_000, seed=7)
    assert stderr > 0
    assert abs(mean - expect_N(10, 3, 1.5)) <= 4 * stderr


@pytest.mark.slow
def test_monte_carlo_within_four_sigma_over_seeds():
    expected = expect_N(5, 2, 1.0)
    hits = 0
    for seed in range(200):
        mean, stderr = mc_N(5, 2, 1.0, samples=2000, seed=seed)
        hits += abs(mean - expected) <= 4 * stderr
    assert hits >= 198


def test_monte_carlo_extreme_thresholds():
    assert mc_N(5, 2, 0.0, samples=100, seed=1)[0] == 0.0
    assert mc_N(5, 2, 1e9, samples=100, seed=1)[0] == 10.0


def test_monte_carlo_is_reproducible_across_thread_counts(monkeypatch):
    single = mc_N(8, 2, 1.0, samples=5_000, seed=3)
    assert mc_N(8, 2, 1.0, samples=5_000, seed=3) == single
    monkeypatch.setenv('ULAMLAB_THREADS', '4')
    assert mc_N(8, 2, 1.0, samples=5_000, seed=3) == single


def test_monte_carlo_caps():
    with pytest.raises(ResourceCapError):
        mc_N(41, 2, 1.0, samples=10, seed=0)
    with pytest.raises(ResourceCapError):
        mc_N(20, 9, 1.0, samples=10, seed=0)
    with pytest.raises(DomainError):
        mc_N(5, 2, 1.0, samples=1, seed=0)


def test_f_m():
    assert f_m(2, 1.0) == 2.5
    assert f_m(1, 0.3) == pytest.approx(0.3)
    assert f_m_integral(3, 0.7) == pytest.approx(f_m(3, 0.7), abs=1e-11)
    assert f_m(2.5, 0.5) == pytest.approx(f_m_integral(2.5, 0.5))
    with pytest.raises(DomainError):
        f_m(2, 0.0)


@pytest.mark.parametrize("kappa, t", [(0.5, 0.5), (1.0, 1.0), (2.0, 3.0)])
def test_replica_m1_is_first_moment(kappa, t):
    assert solve_z(1, kappa, t).ld_value == pytest.approx(first_moment_ld(kappa, t), abs=1e-10)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_replica_constraints(m):
    sol = solve_z(m, 1.0, 1.0)
    for residual in sol.constraint_residuals():
        assert residual == pytest.approx(0.0, abs=1e-10)
    assert replica_constrained_sum(sol) == pytest.approx(sol.ld_value, abs=1e-10)


def test_replica_second_moment_dominates_square_of_first():
    m1 = solve_z(1, 1.0, 1.0).ld_value
    sol = solve_z(2, 1.0, 1.0)
    assert sol.z == pytest.approx(0.6589, abs=1e-3)
    assert sol.ld_value >= 2 * m1


def test_dilog():
    assert dilog(1.0) == pytest.approx(math.pi ** 2 / 6, abs=1e-15)
    assert dilog(-1.0) == pytest.approx(-math.pi ** 2 / 12, abs=1e-14)
    for x in (-50.0, -3.0, -0.7, -0.2, 0.3, 0.6, 0.95):
        assert dilog(x) == pytest.approx(float(mpmath.polylog(2, x)), rel=1e-12)
    with pytest.raises(DomainError):
        dilog(1.5)


def test_replica_ratio_is_increasing_below_sqrt2():
    ratios = [replica_ratio(z) for z in np.geomspace(1e-3, 1e6, 50)]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < SQRT2


def test_replica_to_zero():
    z, value = replica_to_zero(1.0, 1.0)
    assert z == pytest.approx(3.075748, abs=1e-5)
    assert value == pytest.approx(1.686560, abs=1e-5)
    with pytest.raises(InfeasibleTargetError):
        replica_to_zero(1.5, 1.0)


@pytest.mark.parametrize("kappa", [0.2, 0.9, 1.3])
def test_replica_to_zero_solves_ratio_equation(kappa):
    z, value = replica_to_zero(kappa, 1.0)
    assert replica_ratio(z) == pytest.approx(kappa, rel=1e-10)
    assert value > 0


def test_replica_to_zero_next_to_sqrt2():
    z, value = replica_to_zero(SQRT2 - 1e-7, 1.0)
    assert z == math.inf
    assert value == pytest.approx(9.6463215e-4, rel=1e-6)


def test_partition_counts():
    tables = partition_counts(30, 5)
    assert tables.rho[9][3] == 3
    assert tables.p[6][3] == 3
    assert tables.rho[5][3] == 0
    with pytest.raises(ResourceCapError):
        partition_counts(200, 100)


def test_partition_trend_rises_toward_replica_value():
    rows = partition_trend(1.0, 1.0, [100, 400, 900, 1600])
    scaled = [row['scaled'] for row in rows]
    assert scaled == pytest.approx([1.04163, 1.29431, 1.39792, 1.45566], abs=1e-4)
    assert all(b > a for a, b in zip(scaled, scaled[1:]))
    assert scaled[-1] < rows[-1]['replica_value']


def test_poisson_rate():
    assert poisson_ld_check(1.0) == pytest.approx(0.0, abs=1e-10)
    assert poisson_ld(1.0, 2.0) < 0
    with pytest.raises(DomainError):
        poisson_ld_check(0.0)
