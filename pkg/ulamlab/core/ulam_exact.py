"""
Exact moment formulas for Z_{n,k}, the number of length-k increasing
subsequences of a uniform random permutation of size n.

The array A(k, l, j) is the (j+1)-fold two-dimensional convolution power of
B(a, b) = C(a+b, a)^2, truncated to the requested corner. The r-dimensional
generalization uses squared multinomials. Both are available as exact
integers (numpy object arrays) or as natural logs (float64 with logaddexp).
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln

from ..utils.config import get_config
from .errors import DomainError, ResourceCapError
from .numkernel import LogReal, binomial, factorial, log_binomial, multinomial

logger = logging.getLogger(__name__)

EXACT = 'exact'
LOGSPACE = 'logspace'
MODES = (EXACT, LOGSPACE)

__all__ = [
    'CombSlice', 'MomentResult', 'LogMomentResult', 'mean_Z', 'mean_Z_log',
    'comb_A', 'comb_A_slice', 'comb_A_slices', 'comb_A_tilde', 'comb_A_reference',
    'second_moment', 'second_moment_log', 'all_or_nothing_bound',
    'all_or_nothing_bound_log', 'argmax_j',
]


@dataclass
class CombSlice:
    """A(a, b, j) for 0 <= a <= max_k, 0 <= b <= max_l at a fixed j."""

    j: int
    max_k: int
    max_l: int
    mode: str
    values: np.ndarray

    def value(self, a: int, b: int) -> Union[int, LogReal]:
        cell = self.values[a, b]
        if self.mode == EXACT:
            return int(cell)
        return LogReal(1, float(cell))

    def to_rows(self) -> List[Tuple[int, int, int, Union[int, LogReal]]]:
        return [
            (a, b, self.j, self.value(a, b))
            for a in range(self.max_k + 1)
            for b in range(self.max_l + 1)
        ]


@dataclass
class MomentResult:
    n: int
    k: int
    l: int
    order: int
    value: Fraction
    per_j_terms: List[Fraction] = field(default_factory=list)


@dataclass
class LogMomentResult:
    """Log-space moment: log_value = ln(sum_j exp(per_j_log_terms[j]))."""

    n: int
    k: int
    l: int
    order: int
    log_value: float
    per_j_log_terms: List[float] = field(default_factory=list)


def _check_mode(mode: str):
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")


def _check_cap(shape: Sequence[int], j: int):
    cells = j
    for extent in shape:
        cells *= extent
    cap = int(get_config().get('exact_max_cells'))
    if cells > cap:
        raise ResourceCapError("exact convolution size (k*l*j)", cells, cap)


def _squared_multinomial_table(shape: Tuple[int, ...], mode: str) -> np.ndarray:
    if mode == EXACT:
        table = np.empty(shape, dtype=object)
        for index in np.ndindex(*shape):
            table[index] = multinomial(index) ** 2
        return table
    grids = np.indices(shape, dtype=float)
    total = grids.sum(axis=0)
    log_multi = gammaln(total + 1) - gammaln(grids + 1).sum(axis=0)
    return 2.0 * log_multi


def _convolve_truncated(left: np.ndarray, right: np.ndarray, mode: str) -> np.ndarray:
    """Truncated multi-dimensional convolution by shifted accumulation.

    Shifts are visited in C order of the right operand, so each cell sees a
    fixed reduction order.
    """
    shape = left.shape
    if mode == EXACT:
        out = np.zeros(shape, dtype=object)
    else:
        out = np.full(shape, -np.inf)
    for shift in np.ndindex(*shape):
        weight = right[shift]
        src = tuple(slice(0, extent - s) for extent, s in zip(shape, shift))
        dst = tuple(slice(s, extent) for extent, s in zip(shape, shift))
        if mode == EXACT:
            if weight:
                out[dst] += weight * left[src]
        else:
            out[dst] = np.logaddexp(out[dst], weight + left[src])
    return out


@lru_cache(maxsize=16)
def _power_tables(shape: Tuple[int, ...], max_j: int, mode: str) -> Tuple[np.ndarray, ...]:
    """Tables T_0..T_max_j with T_j the (j+1)-fold convolution power."""
    base = _squared_multinomial_table(shape, mode)
    tables = [base]
    for _ in range(max_j):
        tables.append(_convolve_truncated(tables[-1], base, mode))
    logger.debug("built %d convolution powers of shape %s (%s)", max_j + 1, shape, mode)
    for table in tables:
        table.setflags(write=False)
    return tuple(tables)


def _to_scalar(cell, mode: str) -> Union[int, LogReal]:
    if mode == EXACT:
        return int(cell)
    if cell == -np.inf:
        return LogReal.zero()
    return LogReal(1, float(cell))


def comb_A_tilde(r: int, ks: Sequence[int], j: int, mode: str = EXACT) -> Union[int, LogReal]:
    """Generalized array: (j+1)-fold r-dimensional convolution power of squared multinomials."""
    _check_mode(mode)
    ks = tuple(int(k) for k in ks)
    if r < 1 or len(ks) != r:
        raise DomainError(f"expected r={r} indices, got {ks}")
    if j < 0 or any(k < 0 for k in ks):
        raise DomainError("indices must be nonnegative")
    if j == 0:
        value = multinomial(ks) ** 2
        return value if mode == EXACT else LogReal.from_rational(value)
    if mode == EXACT:
        _check_cap(ks, j)
    shape = tuple(k + 1 for k in ks)
    return _to_scalar(_power_tables(shape, j, mode)[j][ks], mode)


def comb_A(k: int, l: int, j: int, mode: str = EXACT) -> Union[int, LogReal]:
    """A(k, l, j); the j = 0 slice is C(k+l, k)^2 and A(0, 0, j) = 1."""
    return comb_A_tilde(2, (k, l), j, mode)


def comb_A_slice(max_k: int, max_l: int, j: int, mode: str = EXACT) -> CombSlice:
    _check_mode(mode)
    if mode == EXACT:
        _check_cap((max_k, max_l), j)
    tables = _power_tables((max_k + 1, max_l + 1), j, mode)
    return CombSlice(j=j, max_k=max_k, max_l=max_l, mode=mode, values=tables[j])


def comb_A_slices(max_k: int, max_l: int, max_j: int, mode: str = EXACT) -> List[CombSlice]:
    """Slices j = 0..max_j from a single run of the convolution powers."""
    _check_mode(mode)
    if mode == EXACT:
        _check_cap((max_k, max_l), max_j)
    tables = _power_tables((max_k + 1, max_l + 1), max_j, mode)
    return [CombSlice(j=j, max_k=max_k, max_l=max_l, mode=mode, values=tables[j])
            for j in range(max_j + 1)]


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        edges = (-1,) + bars + (total + parts - 1,)
        yield tuple(edges[i + 1] - edges[i] - 1 for i in range(parts))


def comb_A_reference(k: int, l: int, j: int) -> int:
    """A(k, l, j) by summing over all composition pairs (exponential cost)."""
    total = 0
    for alpha in _compositions(k, j + 1):
        for beta in _compositions(l, j + 1):
            term = 1
            for a, b in zip(alpha, beta):
                term *= binomial(a + b, a) ** 2
            total += term
    return total


def mean_Z(n: int, k: int) -> Fraction:
    """E[Z_{n,k}] = C(n, k) / k!"""
    if n < 1 or k < 1:
        raise DomainError(f"mean_Z requires n, k >= 1, got n={n}, k={k}")
    return Fraction(binomial(n, k), factorial(k))


def mean_Z_log(n: int, k: int) -> float:
    if k > n:
        return -math.inf
    return log_binomial(n, k) - float(gammaln(k + 1))


def second_moment(n: int, k: int, l: int) -> MomentResult:
    """E[Z_{n,k} Z_{n,l}] = sum_j E[Z_{n,k+l-j}] A(k-j, l-j, j)."""
    if not (1 <= k <= n and 1 <= l <= n):
        raise DomainError(f"second_moment requires 1 <= k, l <= n, got n={n}, k={k}, l={l}")
    m = min(k, l)
    _check_cap((k, l), m)
    tables = _power_tables((k + 1, l + 1), m, EXACT)
    terms = [mean_Z(n, k + l - j) * int(tables[j][k - j, l - j]) for j in range(m + 1)]
    return MomentResult(n=n, k=k, l=l, order=2, value=sum(terms, Fraction(0)), per_j_terms=terms)


def second_moment_log(n: int, k: int, l: int) -> LogMomentResult:
    """Log-space version of second_moment, usable for n in the thousands."""
    if not (1 <= k <= n and 1 <= l <= n):
        raise DomainError(f"second_moment_log requires 1 <= k, l <= n, got n={n}, k={k}, l={l}")
    m = min(k, l)
    tables = _power_tables((k + 1, l + 1), m, LOGSPACE)
    terms = [mean_Z_log(n, k + l - j) + float(tables[j][k - j, l - j]) for j in range(m + 1)]
    total = LogReal.zero()
    for term in terms:
        if term > -math.inf:
            total = total + LogReal(1, term)
    return LogMomentResult(n=n, k=k, l=l, order=2, log_value=total.logmag, per_j_log_terms=terms)


def argmax_j(terms: Sequence) -> int:
    """Index of the dominant term in a j-decomposition."""
    return max(range(len(terms)), key=lambda i: terms[i])


def all_or_nothing_bound(n: int, k: int, r: int) -> Fraction:
    """Lower bound for E[Z_{n,k}^r] keeping only fully shared overlap patterns."""
    if r < 2 or not (1 <= k <= n):
        raise DomainError(f"bound requires r >= 2 and 1 <= k <= n, got r={r}, k={k}, n={n}")
    total = Fraction(0)
    for j in range(k + 1):
        length = r * k - (r - 1) * j
        if length > n:
            continue
        total += mean_Z(n, length) * comb_A_tilde(r, (k - j,) * r, j, EXACT)
    return total


def all_or_nothing_bound_log(n: int, k: int, r: int) -> float:
    if r < 2 or not (1 <= k <= n):
        raise DomainError(f"bound requires r >= 2 and 1 <= k <= n, got r={r}, k={k}, n={n}")
    total = LogReal.zero()
    for j in range(k + 1):
        length = r * k - (r - 1) * j
        if length > n:
            continue
        term = comb_A_tilde(r, (k - j,) * r, j, LOGSPACE)
        total = total + LogReal(1, mean_Z_log(n, length)) * term
    return total.logmag
