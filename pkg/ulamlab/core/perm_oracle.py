"""
Brute-force ground truth: permutation enumeration for Z-moments, lattice
walk enumeration for the random-walk reading of A, and small identities.
"""

import bisect
import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Sequence, Tuple

from ..utils.config import get_config
from .errors import DomainError, MalformedPermutationError, ResourceCapError
from .numkernel import binomial, factorial, multinomial

logger = logging.getLogger(__name__)

__all__ = [
    'WalkSpec', 'count_increasing_subsequences', 'z_profile',
    'longest_increasing_subsequence', 'iter_permutations', 'brute_moments',
    'walk_axis_profile', 'walk_count_A', 'walk_count_unpinned',
    'check_gamma2_identity', 'brute_moment_table', 'brute_power_moments',
    'lis_matches_profile',
]

STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class WalkSpec:
    """Walks of length k+l from the origin to (k-l, 0) with j extra axis times."""

    k: int
    l: int
    j: int

    @property
    def length(self) -> int:
        return self.k + self.l

    @property
    def endpoint(self) -> Tuple[int, int]:
        return (self.k - self.l, 0)


def _validate(perm: Sequence[int]) -> List[int]:
    values = list(perm)
    if sorted(values) != list(range(1, len(values) + 1)):
        raise MalformedPermutationError(f"not a permutation of 1..{len(values)}: {values}")
    return values


def z_profile(perm: Sequence[int]) -> List[int]:
    """[Z_{n,1}, ..., Z_{n,n}] for one permutation by DP over (position, length)."""
    values = _validate(perm)
    n = len(values)
    # ending[i][m]: increasing subsequences of length m+1 ending at position i
    ending = [[0] * n for _ in range(n)]
    for i, v in enumerate(values):
        ending[i][0] = 1
        for p in range(i):
            if values[p] < v:
                row_p, row_i = ending[p], ending[i]
                for m in range(1, i + 1):
                    row_i[m] += row_p[m - 1]
    return [sum(ending[i][m] for i in range(n)) for m in range(n)]


def count_increasing_subsequences(perm: Sequence[int], k: int) -> int:
    values = _validate(perm)
    if not 1 <= k <= len(values):
        raise DomainError(f"k must lie in 1..{len(values)}, got {k}")
    return z_profile(values)[k - 1]


def longest_increasing_subsequence(perm: Sequence[int]) -> int:
    """Patience sorting."""
    piles: List[int] = []
    for v in perm:
        pos = bisect.bisect_left(piles, v)
        if pos == len(piles):
            piles.append(v)
        else:
            piles[pos] = v
    return len(piles)


def iter_permutations(n: int) -> Iterator[Tuple[int, Iterator[Tuple[int, ...]]]]:
    """Shards of S_n keyed by first element, each an iterator of permutations."""
    for first in range(1, n + 1):
        rest = [v for v in range(1, n + 1) if v != first]
        yield first, ((first,) + tail for tail in itertools.permutations(rest))


def brute_moments(n: int, ks: Sequence[int], order: int) -> Fraction:
    """E[prod_i Z_{n,k_i}] over uniform S_n by full enumeration.

    A single entry in ``ks`` with order r is read as the r-th power.
    """
    cap = int(get_config().get('perm_max_n'))
    if n > cap:
        raise ResourceCapError("permutation enumeration size n", n, cap)
    if order not in (1, 2, 3):
        raise DomainError(f"order must be 1, 2 or 3, got {order}")
    ks = list(ks)
    if len(ks) == 1:
        ks = ks * order
    if len(ks) != order:
        raise DomainError(f"expected {order} lengths, got {ks}")
    if any(not 1 <= k <= n for k in ks):
        raise DomainError(f"lengths must lie in 1..{n}, got {ks}")

    shard_totals: Dict[int, int] = {}
    for first, perms in iter_permutations(n):
        subtotal = 0
        for perm in perms:
            profile = z_profile(perm)
            term = 1
            for k in ks:
                term *= profile[k - 1]
            subtotal += term
        shard_totals[first] = subtotal
    total = sum(shard_totals[first] for first in sorted(shard_totals))
    return Fraction(total, factorial(n))


@lru_cache(maxsize=None)
def _axis_counts(steps_left: int, x: int, y: int, target_x: int) -> Tuple[Tuple[int, int], ...]:
    """Walk counts from (x, y) to (target_x, 0), keyed by axis visits after now."""
    if abs(target_x - x) + abs(y) > steps_left or (steps_left - abs(target_x - x) - abs(y)) % 2:
        return ()
    if steps_left == 0:
        return ((0, 1),)
    tally: Counter = Counter()
    for dx, dy in STEPS:
        nx, ny = x + dx, y + dy
        hit = 1 if ny == 0 else 0
        for visits, count in _axis_counts(steps_left - 1, nx, ny, target_x):
            tally[visits + hit] += count
    return tuple(sorted(tally.items()))


def walk_axis_profile(k: int, l: int) -> Dict[int, int]:
    """Number of walks of length k+l ending at (k-l, 0), keyed by |axis times|.

    Axis times include t = 0 and t = k+l.
    """
    cap = int(get_config().get('walk_max_length'))
    if k < 0 or l < 0:
        raise DomainError("walk indices must be nonnegative")
    if k + l > cap:
        raise ResourceCapError("walk length k+l", k + l, cap)
    return {visits + 1: count for visits, count in _axis_counts(k + l, 0, 0, k - l)}


def walk_count_A(k: int, l: int, j: int) -> int:
    """Sum over walks of the number of tuples 0 <= t_0 <= ... <= t_j = k+l of axis times.

    With t_j pinned to the final time, a walk with s axis times contributes
    C(s+j-1, j) tuples.
    """
    if j < 0:
        raise DomainError("j must be nonnegative")
    spec = WalkSpec(k, l, j)
    profile = walk_axis_profile(spec.k, spec.l)
    return sum(count * binomial(s + j - 1, j) for s, count in profile.items())


def check_gamma2_identity(l: int, m: int) -> bool:
    """sum_n multinomial(n, n, l-n, m-n) == C(l+m, l)^2"""
    if l < 0 or m < 0:
        raise DomainError("indices must be nonnegative")
    lhs = sum(multinomial((n, n, l - n, m - n)) for n in range(min(l, m) + 1))
    return lhs == multinomial((l, m)) ** 2


def walk_count_unpinned(k: int, l: int, j: int) -> int:
    """Same count without pinning t_j to the final time: C(s+j, j+1) per walk."""
    profile = walk_axis_profile(k, l)
    return sum(count * binomial(s + j, j + 1) for s, count in profile.items())


def _profiles(n: int) -> Iterator[List[int]]:
    cap = int(get_config().get('perm_max_n'))
    if n > cap:
        raise ResourceCapError("permutation enumeration size n", n, cap)
    for _, perms in iter_permutations(n):
        for perm in perms:
            yield z_profile(perm)


def brute_moment_table(n: int) -> Dict[Tuple[int, int], Fraction]:
    """E[Z_{n,k} Z_{n,l}] for all 1 <= k, l <= n from one enumeration of S_n."""
    sums = [[0] * n for _ in range(n)]
    for profile in _profiles(n):
        for a in range(n):
            za = profile[a]
            if za:
                row = sums[a]
                for b in range(n):
                    row[b] += za * profile[b]
    total = factorial(n)
    return {(a + 1, b + 1): Fraction(sums[a][b], total) for a in range(n) for b in range(n)}


def brute_power_moments(n: int, order: int) -> List[Fraction]:
    """[E[Z_{n,k}^order] for k = 1..n]."""
    sums = [0] * n
    for profile in _profiles(n):
        for a in range(n):
            sums[a] += profile[a] ** order
    return [Fraction(s, factorial(n)) for s in sums]


def lis_matches_profile(n: int) -> bool:
    """max{k : Z_{n,k} > 0} equals the patience-sorting LIS on every permutation of S_n."""
    for _, perms in iter_permutations(n):
        for perm in perms:
            profile = z_profile(perm)
            top = max(k + 1 for k, z in enumerate(profile) if z)
            if top != longest_increasing_subsequence(perm):
                return False
    return True
