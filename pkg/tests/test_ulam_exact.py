import math
from fractions import Fraction

import numpy as np
import pytest

from ulamlab.core import perm_oracle
from ulamlab.core.errors import DomainError, ResourceCapError
from ulamlab.core.ulam_exact import (
    EXACT, LOGSPACE, all_or_nothing_bound, all_or_nothing_bound_log, argmax_j, comb_A,
    comb_A_reference, comb_A_slice, comb_A_slices, comb_A_tilde, mean_Z, mean_Z_log,
    second_moment, second_moment_log,
)


def test_mean_examples():
    assert mean_Z(4, 2) == 3
    assert mean_Z(7, 1) == 7
    assert mean_Z(3, 2) == Fraction(3, 2) == perm_oracle.brute_moments(3, [2], 1)
    assert mean_Z(3, 5) == 0


def test_mean_rejects_bad_arguments():
    with pytest.raises(DomainError):
        mean_Z(0, 1)


def test_mean_log_matches_exact():
    assert mean_Z_log(20, 5) == pytest.approx(math.log(mean_Z(20, 5)), abs=1e-12)
    assert mean_Z_log(3, 5) == -math.inf


@pytest.mark.parametrize("k, l, j, expected", [(2, 1, 0, 9), (0, 0, 5, 1), (1, 1, 1, 10), (3, 0, 0, 1)])
def test_comb_A_examples(k, l, j, expected):
    assert comb_A(k, l, j) == expected


def test_comb_A_matches_composition_sum():
    for k in range(9):
        for l in range(9 - k):
            for j in range(9 - k - l):
                assert comb_A(k, l, j) == comb_A_reference(k, l, j), (k, l, j)


def test_comb_A_symmetry():
    for table in comb_A_slices(12, 12, 12):
        assert np.array_equal(table.values, table.values.T)
        assert table.value(0, 0) == 1


def test_comb_A_logspace_matches_exact():
    exact = comb_A_slices(10, 10, 10, EXACT)
    logs = comb_A_slices(10, 10, 10, LOGSPACE)
    for e_slice, l_slice in zip(exact, logs):
        for a in range(11):
            for b in range(11):
                reference = math.log(int(e_slice.values[a, b]))
                assert abs(l_slice.values[a, b] - reference) <= 1e-8


@pytest.mark.slow
def test_comb_A_logspace_matches_exact_to_twenty():
    exact = comb_A_slices(20, 20, 20, EXACT)
    logs = comb_A_slices(20, 20, 20, LOGSPACE)
    worst = 0.0
    for e_slice, l_slice in zip(exact, logs):
        for a in range(21):
            for b in range(21):
                reference = math.log(int(e_slice.values[a, b]))
                worst = max(worst, abs(math.expm1(float(l_slice.values[a, b]) - reference)))
    assert worst < 1e-8


def test_comb_A_logspace_scalar():
    value = comb_A(6, 4, 3, LOGSPACE)
    assert value.sign == 1
    assert value.logmag == pytest.approx(math.log(comb_A(6, 4, 3)), abs=1e-12)


def test_comb_A_exact_cap(monkeypatch):
    monkeypatch.setenv('ULAMLAB_EXACT_MAX_CELLS', '10')
    with pytest.raises(ResourceCapError):
        comb_A(5, 5, 5)
    # logspace is not capped
    assert comb_A(5, 5, 5, LOGSPACE).sign == 1


def test_comb_A_rejects_bad_mode_and_indices():
    with pytest.raises(DomainError):
        comb_A(1, 1, 1, 'float')
    with pytest.raises(DomainError):
        comb_A(-1, 1, 1)


def test_comb_slice_rows():
    table = comb_A_slice(2, 3, 1)
    rows = table.to_rows()
    assert len(rows) == 12
    assert rows[0] == (0, 0, 1, 1)
    assert (1, 1, 1, 10) in rows


def test_second_moment_examples():
    assert second_moment(3, 2, 2).value == Fraction(19, 6)
    for n in (1, 4, 9):
        assert second_moment(n, 1, 1).value == n * n
    assert second_moment(4, 2, 3).value == perm_oracle.brute_moments(4, [2, 3], 2)


def test_second_moment_decomposition():
    result = second_moment(8, 3, 4)
    assert result.value == sum(result.per_j_terms)
    assert len(result.per_j_terms) == 4
    assert result.value == second_moment(8, 4, 3).value


def test_second_moment_rejects_bad_lengths():
    with pytest.raises(DomainError):
        second_moment(3, 4, 1)


def test_second_moment_log_matches_exact():
    result = second_moment_log(3, 2, 2)
    assert result.log_value == pytest.approx(math.log(19 / 6), abs=1e-12)
    assert len(result.per_j_log_terms) == 3
    exact = second_moment(12, 4, 5)
    assert second_moment_log(12, 4, 5).log_value == pytest.approx(math.log(exact.value), abs=1e-10)


def test_argmax_j():
    assert argmax_j([1, 5, 3]) == 1
    assert argmax_j([Fraction(1, 2), Fraction(1, 3)]) == 0


@pytest.mark.parametrize("ks, j, expected", [((4, 2), 0, 225), ((3,), 0, 1), ((1, 1, 1), 0, 36)])
def test_comb_A_tilde_examples(ks, j, expected):
    assert comb_A_tilde(len(ks), ks, j) == expected


def test_comb_A_tilde_reduces_to_comb_A():
    for k in range(5):
        for l in range(5):
            for j in range(5):
                assert comb_A_tilde(2, (k, l), j) == comb_A(k, l, j)


def test_comb_A_tilde_rejects_wrong_arity():
    with pytest.raises(DomainError):
        comb_A_tilde(3, (1, 1), 0)


def test_all_or_nothing_bound_is_identity_for_squares():
    for k in range(1, 6):
        assert all_or_nothing_bound(5, k, 2) == second_moment(5, k, k).value


def test_all_or_nothing_bound_below_third_moment():
    assert all_or_nothing_bound(6, 2, 3) <= perm_oracle.brute_moments(6, [2], 3)
    assert all_or_nothing_bound(4, 1, 3) == 28
    assert all_or_nothing_bound(4, 1, 3) <= 64


def test_all_or_nothing_bound_log():
    exact = all_or_nothing_bound(6, 2, 3)
    assert all_or_nothing_bound_log(6, 2, 3) == pytest.approx(math.log(exact), abs=1e-12)
    with pytest.raises(DomainError):
        all_or_nothing_bound(4, 2, 1)


def test_holder_on_enumeration():
    for n in range(2, 7):
        second = perm_oracle.brute_power_moments(n, 2)
        third = perm_oracle.brute_power_moments(n, 3)
        for s, t in zip(second, third):
            assert t ** 2 >= s ** 3
