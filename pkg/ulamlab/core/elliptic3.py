"""
The three-variable squared-multinomial generating function

    M3(z1, z2, z3) = sum multinomial(a, b, c)^2 z1^a z2^b z3^c

in closed form, M3(x1^2, x2^2, x3^2) = m(x) K(k(x)), with K the complete
elliptic integral of the first kind evaluated by the arithmetic-geometric
mean. Two independent oracles are provided: the truncated series and a
circle integral of the two-variable closed form.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .errors import DomainError
from .genfun import m2_closed, mgen_contour, squared_multinomial_series

logger = logging.getLogger(__name__)

SIGNS = (1, -1)
AGM_MAX_ITER = 64
X3_SPECIALIZATION = 1e-8

__all__ = [
    'EllipticFactorization', 'omega_roots', 'q_sigma', 'quartic_Q',
    'kappa_tau', 'modulus', 'prefactor', 'elliptic_K', 'M3_elliptic',
    'modulus_specialization', 'kappa_difference_of_squares', 'factorize',
    'm3_series', 'm3_contour',
]


@dataclass
class EllipticFactorization:
    x1: float
    x2: float
    x3: float
    kappa_plus: float
    kappa_minus: float
    modulus: float
    prefactor: float
    omegas: Dict[Tuple[int, int], float]


def _check_domain(x1: float, x2: float, x3: float):
    for s1 in SIGNS:
        for s2 in SIGNS:
            for s3 in SIGNS:
                if 1 + s1 * x1 + s2 * x2 + s3 * x3 <= 0:
                    raise DomainError(f"({x1}, {x2}, {x3}) outside the octahedron |x1|+|x2|+|x3| < 1")


def omega_roots(x1: float, x2: float, x3: float) -> Dict[Tuple[int, int], float]:
    """Roots Omega[(sigma, tau)] of q_sigma, with Omega[(s, +)] * Omega[(s, -)] = 1."""
    if x3 <= 0:
        raise DomainError("omega roots need x3 > 0; use the x3 = 0 specialization")
    roots = {}
    for sigma in SIGNS:
        d2 = (x1 - sigma * x2) ** 2
        outer = (1 + x3) ** 2 - d2
        inner = (1 - x3) ** 2 - d2
        if outer < 0 or inner < 0:
            raise DomainError(f"negative radicand in omega roots at ({x1}, {x2}, {x3})")
        for tau in SIGNS:
            roots[(sigma, tau)] = (math.sqrt(outer) + tau * math.sqrt(inner)) ** 2 / (4 * x3)
    return roots


def q_sigma(sigma: int, x1: float, x2: float, x3: float, omega):
    return (1 - x3 * omega) * (omega - x3) - (x1 - sigma * x2) ** 2 * omega


def quartic_Q(x1: float, x2: float, x3: float, omega):
    base = (1 - x3 * omega) * (omega - x3) - (x1 ** 2 + x2 ** 2) * omega
    return base ** 2 - (2 * x1 * x2 * omega) ** 2


def kappa_tau(tau: int, x1: float, x2: float, x3: float) -> float:
    """Product of sqrt(1 + s1 x1 + s2 x2 + s3 x3) over sign triples with s1 s2 s3 = tau.

    Factors are multiplied in sorted order so equal multisets give equal floats.
    """
    factors = sorted(
        math.sqrt(1 + s1 * x1 + s2 * x2 + s3 * x3)
        for s1 in SIGNS for s2 in SIGNS for s3 in SIGNS
        if s1 * s2 * s3 == tau
    )
    return math.prod(factors)


def modulus(x1: float, x2: float, x3: float) -> float:
    root_p = math.sqrt(kappa_tau(1, x1, x2, x3))
    root_m = math.sqrt(kappa_tau(-1, x1, x2, x3))
    return ((root_p - root_m) / (root_p + root_m)) ** 2


def prefactor(x1: float, x2: float, x3: float) -> float:
    root_p = math.sqrt(kappa_tau(1, x1, x2, x3))
    root_m = math.sqrt(kappa_tau(-1, x1, x2, x3))
    return 8.0 / (math.pi * (root_p + root_m) ** 2)


def elliptic_K(k: float) -> float:
    """K(k) = int_0^1 dt / sqrt((1 - t^2)(1 - k^2 t^2)) = pi / (2 AGM(1, sqrt(1 - k^2)))."""
    if not 0 <= k < 1:
        raise DomainError(f"elliptic_K needs 0 <= k < 1, got {k}")
    a, b = 1.0, math.sqrt(1.0 - k * k)
    for _ in range(AGM_MAX_ITER):
        if abs(a - b) < 1e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def M3_elliptic(x1: float, x2: float, x3: float) -> float:
    """M3(x1^2, x2^2, x3^2); x3 below 1e-8 routes to the two-variable closed form."""
    _check_domain(x1, x2, x3)
    if abs(x3) < X3_SPECIALIZATION:
        return float(np.real(m2_closed(x1 * x1, x2 * x2)))
    return prefactor(x1, x2, x3) * elliptic_K(modulus(x1, x2, x3))


def modulus_specialization(x1: float, x2: float) -> float:
    """k(x1, x2, 0), which vanishes because kappa_+ = kappa_- there."""
    return modulus(x1, x2, 0.0)


def kappa_difference_of_squares(x1: float, x2: float) -> float:
    """kappa_tau(x1, x2, 0) as sqrt(1 - (x1+x2)^2) sqrt(1 - (x1-x2)^2)."""
    return math.sqrt(1 - (x1 + x2) ** 2) * math.sqrt(1 - (x1 - x2) ** 2)


def factorize(x1: float, x2: float, x3: float) -> EllipticFactorization:
    _check_domain(x1, x2, x3)
    return EllipticFactorization(
        x1=x1, x2=x2, x3=x3,
        kappa_plus=kappa_tau(1, x1, x2, x3),
        kappa_minus=kappa_tau(-1, x1, x2, x3),
        modulus=modulus(x1, x2, x3),
        prefactor=prefactor(x1, x2, x3),
        omegas=omega_roots(x1, x2, x3) if x3 > 0 else {},
    )


def m3_series(z1: float, z2: float, z3: float, degree: int = 40) -> Tuple[float, float]:
    """Truncated series value and a bound on the omitted tail.

    The degree-d block is at most (9 max z)^d since the squared multinomials
    of total d sum to at most 9^d.
    """
    series = squared_multinomial_series(3, degree)
    value = math.fsum(
        float(c) * z1 ** a * z2 ** b * z3 ** e for (a, b, e), c in series.items()
    )
    ratio = 9.0 * max(abs(z1), abs(z2), abs(z3))
    tail = ratio ** (degree + 1) / (1.0 - ratio) if ratio < 1 else math.inf
    return value, tail


def m3_contour(x1: float, x2: float, x3: float, **kwargs) -> float:
    """M3(x1^2, x2^2, x3^2) by one circle integral over the two-variable closed form.

    The inner function is m2_closed, not the explicit 1/sqrt(Q) integrand;
    the quartic itself is never integrated.
    """
    value = mgen_contour([x1 * x1, x2 * x2], x3, x3, inner=m2_closed, **kwargs)
    return float(value.real)
