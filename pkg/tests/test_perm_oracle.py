from fractions import Fraction

import pytest

from ulamlab.core.errors import DomainError, MalformedPermutationError, ResourceCapError
from ulamlab.core.perm_oracle import (
    WalkSpec, brute_moment_table, brute_moments, brute_power_moments, check_gamma2_identity,
    count_increasing_subsequences, iter_permutations, lis_matches_profile,
    longest_increasing_subsequence, walk_axis_profile, walk_count_A, walk_count_unpinned,
    z_profile,
)
from ulamlab.core.ulam_exact import comb_A, second_moment


def test_z_profile_of_identity_and_reversal():
    assert z_profile((1, 2, 3)) == [3, 3, 1]
    assert z_profile((3, 2, 1)) == [3, 0, 0]


def test_count_increasing_subsequences():
    assert count_increasing_subsequences((2, 1, 3), 2) == 2
    assert count_increasing_subsequences((1, 2, 3, 4), 2) == 6
    with pytest.raises(DomainError):
        count_increasing_subsequences((2, 1, 3), 4)


@pytest.mark.parametrize("perm", [(1, 1, 2), (0, 1, 2), (1, 2, 4)])
def test_malformed_permutations_are_rejected(perm):
    with pytest.raises(MalformedPermutationError):
        z_profile(perm)


def test_longest_increasing_subsequence():
    assert longest_increasing_subsequence((3, 1, 2, 5, 4)) == 3
    assert longest_increasing_subsequence(()) == 0
    assert lis_matches_profile(5)


def test_iter_permutations_shards():
    shards = [(first, list(perms)) for first, perms in iter_permutations(3)]
    assert [first for first, _ in shards] == [1, 2, 3]
    assert all(len(perms) == 2 for _, perms in shards)
    assert all(perm[0] == first for first, perms in shards for perm in perms)


def test_brute_moment_examples():
    assert brute_moments(3, [2], 1) == Fraction(3, 2)
    assert brute_moments(3, [2, 2], 2) == Fraction(19, 6)
    assert brute_moments(4, [1], 3) == 64
    assert brute_power_moments(3, 2) == [9, Fraction(19, 6), Fraction(1, 6)]


def test_brute_moments_argument_errors():
    with pytest.raises(DomainError):
        brute_moments(4, [2], 4)
    with pytest.raises(DomainError):
        brute_moments(4, [2, 3], 3)
    with pytest.raises(DomainError):
        brute_moments(4, [5], 1)


def test_brute_moments_cap():
    with pytest.raises(ResourceCapError):
        brute_moments(10, [2], 1)


def test_moment_table_matches_formula():
    for n in range(1, 7):
        table = brute_moment_table(n)
        for (k, l), value in table.items():
            assert value == table[(l, k)]
            assert value == second_moment(n, k, l).value, (n, k, l)


def test_walk_spec():
    spec = WalkSpec(3, 1, 2)
    assert spec.length == 4
    assert spec.endpoint == (2, 0)


def test_walk_counts_small():
    assert walk_count_A(1, 0, 0) == 1
    assert walk_count_unpinned(1, 0, 0) == 2
    assert walk_count_A(1, 1, 1) == 10
    assert walk_axis_profile(0, 0) == {1: 1}


def test_walk_counts_match_convolution_powers():
    for k in range(7):
        for l in range(7 - k):
            for j in range(min(k, l) + 3):
                assert walk_count_A(k, l, j) == comb_A(k, l, j), (k, l, j)


def test_walk_cap():
    with pytest.raises(ResourceCapError):
        walk_axis_profile(6, 5)
    with pytest.raises(DomainError):
        walk_count_A(1, 1, -1)


def test_gamma2_identity():
    assert all(check_gamma2_identity(l, m) for l in range(31) for m in range(31 - l))
    assert check_gamma2_identity(20, 10)
