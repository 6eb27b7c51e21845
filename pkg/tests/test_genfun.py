import math
from fractions import Fraction

import numpy as np
import pytest

from ulamlab.core.errors import ContourConvergenceError, DomainError, ResourceCapError
from ulamlab.core.genfun import (
    SeriesMV, binomial_contour, diagonal_contour, squared_binomial_base, geometric_structure_check,
    gf_A_coefficients, gf_A_tilde, gf_distinct_partitions, m1_closed, m2_closed,
    mgen_contour, series_sqrt_reciprocal, singularity_radius_check, squared_multinomial_series,
    torus_mean,
)
from ulamlab.core.numkernel import binomial
from ulamlab.core.ulam_exact import comb_A, comb_A_slices, comb_A_tilde


def test_series_arithmetic():
    x = SeriesMV.variable(1, 2, 0)
    one = SeriesMV.constant(1, 2)
    cube = (one + x) ** 3
    assert cube.coefficient((1,)) == 3
    assert cube.coefficient((2,)) == 3
    assert cube.coefficient((3,)) == 0
    assert (cube - cube).coeffs == {}
    assert (x * Fraction(1, 2)).coefficient((1,)) == Fraction(1, 2)
    assert x.shift(0, 1).coefficient((2,)) == 1


def test_series_rejects_mismatched_variables():
    with pytest.raises(DomainError):
        SeriesMV.variable(1, 2, 0) + SeriesMV.variable(2, 2, 0)
    with pytest.raises(DomainError):
        SeriesMV.variable(1, 2, 0) ** -1


def test_sqrt_reciprocal_gives_squared_binomials():
    series = series_sqrt_reciprocal(squared_binomial_base(10), 10)
    for k in range(11):
        for l in range(11 - k):
            assert series.coefficient((k, l)) == binomial(k + l, k) ** 2


def test_sqrt_reciprocal_roundtrip():
    base = squared_binomial_base(8)
    root = series_sqrt_reciprocal(base, 8)
    assert root * root * base == SeriesMV.constant(2, 8)


def test_sqrt_reciprocal_needs_unit_constant():
    with pytest.raises(DomainError):
        series_sqrt_reciprocal(SeriesMV.constant(1, 3, 2))


def test_gf_A_coefficients_match_array():
    gf = gf_A_coefficients(8)
    for k in range(9):
        for l in range(9 - k):
            for j in range(9 - k - l):
                assert gf.coefficient((k, l, j)) == comb_A(k, l, j), (k, l, j)
    assert geometric_structure_check(6)


@pytest.mark.slow
def test_gf_A_coefficients_match_array_to_degree_twelve():
    gf = gf_A_coefficients(12)
    slices = comb_A_slices(12, 12, 12)
    wrong = [
        (k, l, j) for k in range(13) for l in range(13 - k) for j in range(13 - k - l)
        if gf.coefficient((k, l, j)) != slices[j].value(k, l)
    ]
    assert wrong == []


def test_gf_A_degree_cap():
    with pytest.raises(ResourceCapError):
        gf_A_coefficients(15)


def test_gf_A_tilde_matches_generalized_array():
    gf = gf_A_tilde(3, 5)
    for exps, value in gf.items():
        *ks, j = exps
        assert value == comb_A_tilde(3, ks, j)
    assert squared_multinomial_series(1, 4).coefficient((4,)) == 1
    with pytest.raises(DomainError):
        gf_A_tilde(4, 3)


def test_closed_forms():
    assert m1_closed(0.1, 0.2) == pytest.approx(1 / 0.7)
    assert m2_closed(0.1, 0.1).real == pytest.approx(1 / math.sqrt(0.6))


def test_diagonal_contour_recovers_m2():
    value = diagonal_contour(m1_closed, m1_closed, [0.3, 0.2], [0.3, 0.2])
    expected = m2_closed(0.09, 0.04).real
    assert value.real == pytest.approx(expected, abs=1e-10)
    with pytest.raises(DomainError):
        diagonal_contour(m1_closed, m1_closed, [0.3], [0.3, 0.2])


def test_mgen_contour_lifts_m1_to_m2():
    value = mgen_contour([0.01], 0.1, 0.1)
    assert value.real == pytest.approx(1 / math.sqrt(0.96), abs=1e-10)
    with pytest.raises(DomainError):
        mgen_contour([0.01, 0.01, 0.01], 0.1, 0.1)


@pytest.mark.parametrize("k, l", [(4, 2), (0, 0), (5, 0), (3, 3)])
def test_binomial_contour(k, l):
    assert binomial_contour(k, l) == pytest.approx(binomial(k + l, k), rel=1e-8)


@pytest.mark.slow
def test_binomial_contour_full_grid():
    worst = max(
        abs(binomial_contour(k, l) - binomial(k + l, k)) / binomial(k + l, k)
        for k in range(31) for l in range(31)
    )
    assert worst < 1e-8


def test_binomial_contour_rejects_negative_index():
    with pytest.raises(DomainError):
        binomial_contour(-1, 2)


def test_singularity_radius():
    r, denominator = singularity_radius_check()
    assert r == pytest.approx(math.sqrt(5) - 2, abs=1e-14)
    assert denominator == pytest.approx(1e-6, rel=1e-6)


def test_torus_mean_errors():
    with pytest.raises(DomainError):
        torus_mean(lambda w: np.ones_like(w), 1, min_nodes=48)
    with pytest.raises(ContourConvergenceError):
        torus_mean(lambda w: np.ones_like(w), 1, min_nodes=64, max_nodes=64)


def test_torus_mean_constant_term():
    value = torus_mean(lambda w: 3.0 + w + w ** -2, 1)
    assert value == pytest.approx(3.0)


def test_distinct_partitions():
    gf = gf_distinct_partitions(9, 3)
    assert gf.coefficient((9, 3)) == 3
    assert gf.coefficient((0, 0)) == 1
    assert gf.coefficient((3, 2)) == 1
