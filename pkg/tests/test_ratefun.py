import math

import numpy as np
import pytest

from ulamlab.core.errors import DomainError
from ulamlab.core.ratefun import (
    ARRAY_NORMALIZATION, MOMENT_NORMALIZATION, RateQuery, appendixD_saddle, array_convergence,
    asymmetric_foc_residual, first_moment_rate, h, hform_corrections, ld_mixed_printed,
    ld_second_moment_printed, printed_forms_gap, multinomial_stirling_check, psi, rate_A,
    rate_first_moment_exact_log, saddle_XYZ, second_moment_convergence, solve_P_mixed,
    solve_P_symmetric, symmetric_foc_residual, varadhan_objective, varadhan_second_moment,
)


def test_entropy_helpers():
    assert psi(0.0) == 0.0
    assert h(0.5) == pytest.approx(math.log(2), abs=1e-15)


def test_rate_query_validation():
    with pytest.raises(DomainError):
        RateQuery(0.0, 1.0)
    with pytest.raises(DomainError):
        RateQuery(1.0, 1.0, -0.1)


def test_rate_at_unit_point():
    q = RateQuery(1.0, 1.0, 1.0)
    expected = 2.5 * math.log(5)
    for form in ('xyz', 'hform', 'symmetric'):
        assert rate_A(q, form) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("kappa, lam, gamma", [(1.0, 2.0, 0.5), (0.3, 1.7, 2.0), (2.0, 2.0, 0.1),
                                                (5.0, 0.2, 3.0)])
def test_rate_forms_agree(kappa, lam, gamma):
    q = RateQuery(kappa, lam, gamma)
    assert rate_A(q, 'hform') == pytest.approx(rate_A(q, 'xyz'), abs=1e-10)


def test_symmetric_form_requires_equal_lengths():
    with pytest.raises(DomainError):
        rate_A(RateQuery(1.0, 2.0, 1.0), 'symmetric')
    with pytest.raises(DomainError):
        rate_A(RateQuery(1.0, 1.0, 1.0), 'polar')


def test_saddle_lies_on_variety():
    for kappa, lam, gamma in [(1, 1, 1), (1, 3, 0.5), (2, 0.5, 4)]:
        triple = saddle_XYZ(RateQuery(kappa, lam, gamma))
        assert triple.variety_residual() == pytest.approx(0.0, abs=1e-14)


def test_hform_corrections_vanish_on_diagonal():
    first, second = hform_corrections(RateQuery(1.5, 1.5, 0.7))
    assert first == pytest.approx(0.0, abs=1e-15)
    assert second == pytest.approx(0.0, abs=1e-15)
    first, _ = hform_corrections(RateQuery(1.0, 3.0, 0.7))
    assert first < 0


def test_first_moment_rate():
    assert first_moment_rate(1.0) == 2.0
    with pytest.raises(DomainError):
        first_moment_rate(0.0)
    with pytest.raises(DomainError):
        rate_first_moment_exact_log(0, 1)


def test_first_moment_convergence():
    errors = [abs(rate_first_moment_exact_log(n, int(math.isqrt(n))) - 2.0)
              for n in (100, 400, 2500, 10_000)]
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 0.1


@pytest.mark.parametrize("kappa, lam, expected", [
    (1.0, 1.0, 4.0914060944),
    (2.0, 2.0, 3.4424645777),
    (0.5, 0.5, 3.3900919465),
    (1.0, 2.0, 3.5380015017),
    (1.0, 4.0, -0.3737524022),
])
def test_varadhan_values(kappa, lam, expected):
    value, gamma_star = varadhan_second_moment(kappa, lam)
    assert value == pytest.approx(expected, abs=1e-8)
    assert 0 <= gamma_star <= min(kappa, lam)


def test_varadhan_optimizer_solves_first_order_condition():
    value, gamma_star = varadhan_second_moment(1.0, 1.0)
    assert gamma_star == pytest.approx(0.14167, abs=1e-4)
    assert symmetric_foc_residual(1.0, gamma_star) == pytest.approx(0.0, abs=1e-4)
    assert value >= 2 * first_moment_rate(1.0)


@pytest.mark.parametrize("kappa, lam", [(1.0, 1.0), (1.0, 2.0), (0.5, 3.0)])
def test_varadhan_refinement_beats_neighbours(kappa, lam):
    value, gamma_star = varadhan_second_moment(kappa, lam)
    assert value == pytest.approx(varadhan_objective(gamma_star, kappa, lam), abs=1e-15)
    for step in (1e-4, 1e-6):
        assert varadhan_objective(gamma_star - step, kappa, lam) <= value
        assert varadhan_objective(gamma_star + step, kappa, lam) <= value


def test_symmetric_P():
    assert solve_P_symmetric(8 / 3) == pytest.approx(0.125, abs=1e-12)
    assert solve_P_symmetric(1.0) == pytest.approx(0.07460947, abs=1e-8)
    assert printed_forms_gap(1.0) < 1e-12
    sweep = [solve_P_symmetric(k) for k in np.linspace(0.1, 10.0, 25)]
    assert all(b > a for a, b in zip(sweep, sweep[1:]))
    assert sweep[-1] < 0.25


def test_printed_symmetric_rate_differs_from_oracle():
    result = ld_second_moment_printed(1.0)
    assert result.printed_value == pytest.approx(4.7584, abs=1e-4)
    assert result.oracle_value == pytest.approx(4.0914060944, abs=1e-8)
    assert result.discrepancy > 0.6
    assert result.normalization == MOMENT_NORMALIZATION
    closed = ld_second_moment_printed(8 / 3, with_oracle=False)
    assert closed.printed_value == pytest.approx(2 * (8 / 3) * (1.5 - math.log(2)), abs=1e-12)
    assert closed.oracle_value is None


@pytest.mark.parametrize("kappa, lam, expected", [
    (1.0, 1.0, 4.11305),
    (2.0, 2.0, 3.98349),
    (0.5, 0.5, 3.39020),
    (1.0, 2.0, 3.64259),
    (1.0, 4.0, -0.19998),
])
def test_printed_asymmetric_values(kappa, lam, expected):
    result = ld_mixed_printed(kappa, lam, with_oracle=False)
    assert result.printed_value == pytest.approx(expected, abs=1e-5)


def test_asymmetric_rate_orders_arguments():
    assert solve_P_mixed(1.0, 2.0) == solve_P_mixed(2.0, 1.0)
    forward = ld_mixed_printed(1.0, 2.0, with_oracle=False).printed_value
    backward = ld_mixed_printed(2.0, 1.0, with_oracle=False).printed_value
    assert forward == backward


@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
def test_asymmetric_equation_matches_symmetric_condition(kappa):
    residual, g = asymmetric_foc_residual(kappa)
    assert residual == pytest.approx(0.0, abs=1e-8)
    assert 0 < g < kappa


def test_saddle_radii():
    saddle = appendixD_saddle(1.0, 1.0, 10_000)
    assert saddle.t_star == pytest.approx(0.2, abs=1e-15)
    assert saddle.s_star == pytest.approx(1 / math.sqrt(5), abs=1e-15)
    assert saddle.ldr1_limit == pytest.approx(saddle.rate_xyz, abs=1e-12)
    assert saddle.scaled_calD == pytest.approx(1.0, rel=0.02)
    assert saddle.scaled_bbD == pytest.approx(1.0, rel=0.02)
    with pytest.raises(DomainError):
        appendixD_saddle(1.0, 0.0, 10)


def test_multinomial_stirling():
    assert multinomial_stirling_check([50, 50]) == pytest.approx(1.0, rel=0.01)
    coarse = abs(multinomial_stirling_check([10, 10, 10]) - 1)
    fine = abs(multinomial_stirling_check([100, 100, 100]) - 1)
    assert fine < coarse
    with pytest.raises(DomainError):
        multinomial_stirling_check([3, 0])


def test_array_convergence():
    rows = array_convergence([8, 16, 32])
    errors = [row['abs_err'] for row in rows]
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert rows[0]['rate'] == pytest.approx(2.5 * math.log(5))
    assert ARRAY_NORMALIZATION.startswith('N^-1')


@pytest.mark.slow
def test_array_convergence_to_forty_eight():
    rows = array_convergence([8, 16, 32, 48])
    errors = [row['abs_err'] for row in rows]
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert rows[-1]['estimate'] == pytest.approx(rows[-1]['rate'], abs=0.3)


@pytest.mark.slow
def test_second_moment_convergence():
    rows = second_moment_convergence([400, 900, 1600, 2500])
    errors = [row['abs_err'] for row in rows]
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert errors[-1] == pytest.approx(0.227, abs=0.01)
    last = rows[-1]
    assert abs(last['gamma_hat'] - last['gamma_star']) / last['gamma_star'] < 0.2
