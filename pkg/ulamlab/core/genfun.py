"""
Truncated multivariate power series with exact coefficients, and
trapezoidal contour quadrature for diagonal extraction.

Series arithmetic is exact (``Fraction`` coefficients, truncated by total
degree); contour values are floats.
"""

import logging
import math
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from ..utils.config import get_config
from .errors import ContourConvergenceError, DomainError, ResourceCapError, UlamlabError
from .numkernel import multinomial
from .roots import bisect_root

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]

__all__ = [
    'SeriesMV', 'series_sqrt_reciprocal', 'squared_binomial_base', 'gf_A_coefficients',
    'gf_A_tilde', 'squared_multinomial_series', 'geometric_structure_check',
    'torus_mean', 'diagonal_contour', 'mgen_contour', 'binomial_contour',
    'm1_closed', 'm2_closed', 'singularity_radius_check',
    'gf_distinct_partitions',
]


class SeriesMV:
    """Multivariate power series truncated at a total degree.

    Absent exponents have coefficient zero; terms above the truncation
    degree are never stored.
    """

    def __init__(self, nvars: int, max_total_degree: int,
                 coeffs: Optional[Dict[Exponent, Fraction]] = None):
        if nvars < 1 or max_total_degree < 0:
            raise DomainError("series needs nvars >= 1 and a nonnegative degree")
        self.nvars = nvars
        self.max_total_degree = max_total_degree
        self.coeffs: Dict[Exponent, Fraction] = {}
        for exps, c in (coeffs or {}).items():
            self._accumulate(tuple(exps), Fraction(c))

    def _accumulate(self, exps: Exponent, c: Fraction):
        if len(exps) != self.nvars:
            raise DomainError(f"exponent {exps} has wrong arity for {self.nvars} variables")
        if sum(exps) > self.max_total_degree or c == 0:
            return
        total = self.coeffs.get(exps, 0) + c
        if total:
            self.coeffs[exps] = total
        else:
            self.coeffs.pop(exps, None)

    @classmethod
    def constant(cls, nvars: int, degree: int, value=1) -> 'SeriesMV':
        return cls(nvars, degree, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, degree: int, index: int) -> 'SeriesMV':
        exps = tuple(1 if i == index else 0 for i in range(nvars))
        return cls(nvars, degree, {exps: 1})

    def _like(self, other: 'SeriesMV') -> int:
        if self.nvars != other.nvars:
            raise DomainError("series have different numbers of variables")
        return min(self.max_total_degree, other.max_total_degree)

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self.coeffs.get(tuple(exps), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coefficient((0,) * self.nvars)

    def truncate(self, degree: int) -> 'SeriesMV':
        return SeriesMV(self.nvars, min(degree, self.max_total_degree), self.coeffs)

    def __add__(self, other: 'SeriesMV') -> 'SeriesMV':
        out = SeriesMV(self.nvars, self._like(other), self.coeffs)
        for exps, c in other.coeffs.items():
            out._accumulate(exps, c)
        return out

    def __neg__(self) -> 'SeriesMV':
        return self.scale(-1)

    def __sub__(self, other: 'SeriesMV') -> 'SeriesMV':
        return self + (-other)

    def scale(self, factor) -> 'SeriesMV':
        factor = Fraction(factor)
        return SeriesMV(self.nvars, self.max_total_degree,
                        {e: c * factor for e, c in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, SeriesMV):
            return self.scale(other)
        degree = self._like(other)
        out = SeriesMV(self.nvars, degree)
        right = sorted(other.coeffs.items(), key=lambda item: sum(item[0]))
        for e1, c1 in self.coeffs.items():
            d1 = sum(e1)
            for e2, c2 in right:
                if d1 + sum(e2) > degree:
                    break
                out._accumulate(tuple(a + b for a, b in zip(e1, e2)), c1 * c2)
        return out

    __rmul__ = __mul__

    def __pow__(self, power: int) -> 'SeriesMV':
        if power < 0:
            raise DomainError("negative powers are not supported")
        result = SeriesMV.constant(self.nvars, self.max_total_degree)
        base = self
        while power:
            if power & 1:
                result = result * base
            power >>= 1
            if power:
                base = base * base
        return result

    def shift(self, index: int, by: int) -> 'SeriesMV':
        """Multiply by the monomial x_index**by."""
        out = SeriesMV(self.nvars, self.max_total_degree)
        for exps, c in self.coeffs.items():
            moved = list(exps)
            moved[index] += by
            out._accumulate(tuple(moved), c)
        return out

    def embed(self, nvars: int, positions: Sequence[int], degree: Optional[int] = None) -> 'SeriesMV':
        """Reinterpret as a series in ``nvars`` variables, variable i going to positions[i]."""
        out = SeriesMV(nvars, self.max_total_degree if degree is None else degree)
        for exps, c in self.coeffs.items():
            wide = [0] * nvars
            for pos, e in zip(positions, exps):
                wide[pos] = e
            out._accumulate(tuple(wide), c)
        return out

    def evaluate(self, point: Sequence[complex]) -> complex:
        total = 0.0
        for exps, c in self.coeffs.items():
            term = float(c)
            for x, e in zip(point, exps):
                term *= x ** e
            total += term
        return total

    def items(self) -> Iterable[Tuple[Exponent, Fraction]]:
        return sorted(self.coeffs.items())

    def __eq__(self, other) -> bool:
        return (isinstance(other, SeriesMV) and self.nvars == other.nvars
                and self.max_total_degree == other.max_total_degree
                and self.coeffs == other.coeffs)

    def __repr__(self) -> str:
        return f"SeriesMV(nvars={self.nvars}, degree={self.max_total_degree}, terms={len(self.coeffs)})"


def _half_binomial(n: int) -> Fraction:
    """binom(-1/2, n)"""
    value = Fraction(1)
    for i in range(n):
        value *= Fraction(-1, 2) - i
        value /= i + 1
    return value


def series_sqrt_reciprocal(base: SeriesMV, D: Optional[int] = None) -> SeriesMV:
    """base**(-1/2) to total degree D by Newton's binomial series in (base - 1)."""
    if D is None:
        D = base.max_total_degree
    if base.constant_term() != 1:
        raise DomainError(f"constant term must be 1, got {base.constant_term()}")
    base = base.truncate(D)
    tail = base - SeriesMV.constant(base.nvars, D)
    result = SeriesMV.constant(base.nvars, D)
    power = SeriesMV.constant(base.nvars, D)
    for n in range(1, D + 1):
        power = power * tail
        if not power.coeffs:
            break
        result = result + power.scale(_half_binomial(n))
    return result


def squared_binomial_base(D: int) -> SeriesMV:
    """1 - 2(x+y) + (x-y)^2 in two variables."""
    x = SeriesMV.variable(2, D, 0)
    y = SeriesMV.variable(2, D, 1)
    one = SeriesMV.constant(2, D)
    return one - (x + y).scale(2) + (x - y) * (x - y)


def _check_degree(D: int):
    cap = int(get_config().get('series_max_degree'))
    if D > cap:
        raise ResourceCapError("series truncation degree", D, cap)


def _geometric_in_last(inner: SeriesMV, D: int) -> SeriesMV:
    """sum_j inner**(j+1) w**j with w appended as the last variable."""
    nvars = inner.nvars + 1
    positions = list(range(inner.nvars))
    out = SeriesMV(nvars, D)
    power = inner
    for j in range(D + 1):
        out = out + power.embed(nvars, positions, D).shift(nvars - 1, j)
        power = (power * inner).truncate(D - j - 1) if j < D else power
    return out


def gf_A_coefficients(D: int) -> SeriesMV:
    """Series of 1/(sqrt(1 - 2(x+y) + (x-y)^2) - z) in (x, y, z)."""
    _check_degree(D)
    m2 = series_sqrt_reciprocal(squared_binomial_base(D), D)
    return _geometric_in_last(m2, D)


def squared_multinomial_series(r: int, D: int) -> SeriesMV:
    coeffs = {}
    for exps in product(range(D + 1), repeat=r):
        if sum(exps) <= D:
            coeffs[exps] = multinomial(exps) ** 2
    return SeriesMV(r, D, coeffs)


def gf_A_tilde(r: int, D: int) -> SeriesMV:
    """Series of 1/(M_r^{-1} - w) in (x_1, ..., x_r, w)."""
    if r not in (1, 2, 3):
        raise DomainError(f"r must be 1, 2 or 3, got {r}")
    _check_degree(D)
    return _geometric_in_last(squared_multinomial_series(r, D), D)


def geometric_structure_check(D: int) -> bool:
    """gf_A equals sum_j S**(j+1) z**j where S is 1/sqrt(1 - 2(x+y) + (x-y)^2)."""
    gf = gf_A_coefficients(D)
    s = series_sqrt_reciprocal(squared_binomial_base(D), D)
    for exps, c in gf.items():
        k, l, j = exps
        if (s ** (j + 1)).coefficient((k, l)) != c:
            return False
    return True


def m1_closed(*zs: complex) -> complex:
    return 1.0 / (1.0 - sum(zs))


def m2_closed(z1: complex, z2: complex) -> complex:
    """((1 - (z1+z2))^2 - 4 z1 z2)^(-1/2) on the principal branch."""
    return 1.0 / np.sqrt((1.0 - (z1 + z2)) ** 2 - 4.0 * z1 * z2 + 0j)


def torus_mean(func: Callable[..., np.ndarray], dim: int, min_nodes: Optional[int] = None,
               max_nodes: Optional[int] = None, tol: Optional[float] = None,
               chunk: int = 1 << 18) -> complex:
    """Mean of func over the unit torus by the trapezoid rule with node doubling.

    ``func`` receives ``dim`` arrays of unit complex numbers. Node counts are
    per axis and powers of two; evaluation is chunked along the first axis.
    """
    config = get_config()
    nodes = int(min_nodes or config.get('contour_min_nodes'))
    max_nodes = int(max_nodes or config.get('contour_max_nodes'))
    tol = float(tol if tol is not None else config.get('contour_tol'))
    if nodes & (nodes - 1):
        raise DomainError(f"node count must be a power of two, got {nodes}")

    def estimate(count: int) -> complex:
        circle = np.exp(2j * np.pi * np.arange(count) / count)
        if dim == 1:
            return complex(np.mean(func(circle)))
        rest = np.meshgrid(*([circle] * (dim - 1)), indexing='ij')
        rows = max(1, chunk // rest[0].size)
        total = 0j
        for start in range(0, count, rows):
            first = circle[start:start + rows].reshape((-1,) + (1,) * (dim - 1))
            total += complex(np.sum(func(first, *[r[np.newaxis] for r in rest])))
        return total / count ** dim

    previous = current = estimate(nodes)
    while nodes < max_nodes:
        nodes *= 2
        current = estimate(nodes)
        if abs(current - previous) <= tol * max(1.0, abs(current)):
            return current
        previous = current
    raise ContourConvergenceError(nodes, (previous, current), tol)


def diagonal_contour(f_outer: Callable[..., np.ndarray], f_inner: Callable[..., np.ndarray],
                     xs: Sequence[float], ys: Sequence[float], **kwargs) -> complex:
    """CT_omega f_outer(x omega) f_inner(y / omega), the diagonal of a product.

    With f_outer = f_inner = m1_closed this is M_r^(2)(x_1 y_1, ..., x_r y_r).
    """
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        raise DomainError("xs and ys must have the same length")

    def integrand(*omegas):
        outer = f_outer(*[x * w for x, w in zip(xs, omegas)])
        inner = f_inner(*[y / w for y, w in zip(ys, omegas)])
        return outer * inner

    return torus_mean(integrand, len(xs), **kwargs)


def mgen_contour(zs: Sequence[float], x: float, y: float,
                 inner: Optional[Callable[..., np.ndarray]] = None, **kwargs) -> complex:
    """M_r^(2)(z_1, ..., z_{r-1}, x y) from M_{r-1}^(2) by one circle integral.

    ``inner`` evaluates M_{r-1}^(2); it defaults to m1_closed for one z and
    m2_closed for two.
    """
    zs = list(zs)
    if inner is None:
        if len(zs) == 1:
            inner = m1_closed
        elif len(zs) == 2:
            inner = m2_closed
        else:
            raise DomainError("an inner evaluator is required beyond r = 3")

    def integrand(omega):
        denom = (1.0 - x * omega) * (omega - y)
        scaled = [z * omega / denom for z in zs]
        return omega / denom * inner(*scaled)

    return torus_mean(integrand, 1, **kwargs)


def binomial_contour(k: int, l: int, **kwargs) -> float:
    """C(k+l, k) from a double Cauchy integral of 1/(1 - x - y).

    Radii are k/(k+l+2) and l/(k+l+2); a zero index uses 0.5/(k+l+2), so the
    radii always sum to less than one.
    """
    if k < 0 or l < 0:
        raise DomainError("indices must be nonnegative")
    total = k + l + 2
    lam = [k, l]
    radii = [(v if v > 0 else 0.5) / total for v in lam]

    def integrand(w1, w2):
        value = 1.0 / (1.0 - radii[0] * w1 - radii[1] * w2)
        return value * w1 ** (-k) * w2 ** (-l)

    scale = radii[0] ** (-k) * radii[1] ** (-l)
    kwargs.setdefault('tol', 1e-10)
    return float((torus_mean(integrand, 2, **kwargs) * scale).real)


def singularity_radius_check() -> Tuple[float, float]:
    """Positive diagonal root of sqrt(1 - 4r) = r, returned with the
    gf_A denominator just inside the singularity.
    """
    r = bisect_root(lambda v: math.sqrt(1.0 - 4.0 * v) - v, 0.0, 0.25,
                    name="singular radius", open_ends=False, xtol=1e-17)
    expected = math.sqrt(5.0) - 2.0
    if abs(r - expected) > 1e-14:
        raise UlamlabError(f"singular radius {r!r} differs from sqrt(5)-2")
    x = y = r
    z = r - 1e-6
    denominator = math.sqrt(1.0 - 2.0 * (x + y) + (x - y) ** 2) - z
    return r, denominator


def gf_distinct_partitions(max_n: int, max_k: int) -> SeriesMV:
    """prod_{m <= max_n} (1 + q^m z) as a series in (q, z), truncated per variable."""
    degree = max_n + max_k
    out = SeriesMV.constant(2, degree)
    for m in range(1, max_n + 1):
        factor = SeriesMV(2, degree, {(0, 0): 1, (m, 1): 1})
        product_ = out * factor
        out = SeriesMV(2, degree, {e: c for e, c in product_.coeffs.items()
                                   if e[0] <= max_n and e[1] <= max_k})
    return out
