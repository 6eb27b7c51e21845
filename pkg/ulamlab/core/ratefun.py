"""
Large-deviation rate functions for the first and second moments of Z_{n,k}
and for the array A(k, l, j), with the implicit-equation solvers for the
printed closed forms and a Varadhan-type optimizer used as ground truth.

Normalizations: moment rates are per n^{1/2}; rates of A(kN, lN, gN) are
per N. Every RateResult states its normalization.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize
from scipy.special import xlogy

from .errors import DomainError
from .numkernel import multinomial
from .roots import bisect_root
from .ulam_exact import LOGSPACE, argmax_j, comb_A, mean_Z_log, second_moment_log

logger = logging.getLogger(__name__)

FORMS = ('xyz', 'hform', 'symmetric')
VARADHAN_GRID = 2001
MOMENT_NORMALIZATION = 'n^-1/2 ln E[Z_{n,k} Z_{n,l}]'
ARRAY_NORMALIZATION = 'N^-1 ln A(kN, lN, gN)'


@dataclass(frozen=True)
class RateQuery:
    kappa: float
    lam: float
    gamma: float = 0.0

    def __post_init__(self):
        if not (self.kappa > 0 and self.lam > 0 and self.gamma >= 0):
            raise DomainError(f"need kappa, lambda > 0 and gamma >= 0, got {self}")

    @property
    def rho(self) -> float:
        """gamma / (2 (kappa + lambda)), the h-form parameter."""
        return self.gamma / (2.0 * (self.kappa + self.lam))

    @property
    def rho_symmetric(self) -> float:
        return self.gamma / (4.0 * self.kappa)


@dataclass(frozen=True)
class SaddleTriple:
    X: float
    Y: float
    Z: float

    def variety_residual(self) -> float:
        """Z^2 - (1 - 2(X+Y) + (X-Y)^2)."""
        return self.Z ** 2 - (1.0 - 2.0 * (self.X + self.Y) + (self.X - self.Y) ** 2)


@dataclass
class RateResult:
    printed_value: float
    oracle_value: Optional[float] = None
    optimizer_gamma: Optional[float] = None
    discrepancy: Optional[float] = None
    P: Optional[float] = None
    normalization: str = MOMENT_NORMALIZATION

    def attach_oracle(self, value: float, gamma_star: float) -> 'RateResult':
        self.oracle_value = value
        self.optimizer_gamma = gamma_star
        self.discrepancy = abs(self.printed_value - value)
        return self


@dataclass
class AppendixDSaddle:
    kappa: float
    gamma: float
    N: int
    t_star: float
    s_star: float
    t_N: float
    s_N: float
    bbD: float
    calN: float
    calD: float
    scaled_calD: float
    scaled_bbD: float
    ldr1_finite: float
    ldr1_limit: float
    rate_xyz: float


def psi(x: float) -> float:
    return -float(xlogy(x, x))


def h(theta: float) -> float:
    return psi(theta) + psi(1.0 - theta)


def first_moment_rate(kappa: float) -> float:
    """lim n^-1/2 ln E[Z_{n,k}] for k ~ kappa n^1/2."""
    if kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    return 2.0 * kappa * (1.0 - math.log(kappa))


def rate_first_moment_exact_log(n: int, k: int) -> float:
    """n^-1/2 ln E[Z_{n,k}] from the exact mean, in log space."""
    if n < 1 or k < 1:
        raise DomainError(f"need n, k >= 1, got n={n}, k={k}")
    return mean_Z_log(n, k) / math.sqrt(n)


def saddle_XYZ(q: RateQuery) -> SaddleTriple:
    k, l, g = q.kappa, q.lam, q.gamma
    outer = (k + l + g) * (2 * k + 2 * l + g)
    X = k * (2 * k + g) / outer
    Y = l * (2 * l + g) / outer
    Z = math.sqrt(g * (2 * k + g) * (2 * l + g) / (2 * k + 2 * l + g)) / (k + l + g)
    return SaddleTriple(X, Y, Z)


def _rate_xyz(k: float, l: float, g: float) -> float:
    """-k ln X - l ln Y - g ln Z, with zero-weight terms dropped (boundaries allowed)."""
    total = k + l
    if total <= 0:
        return 0.0
    outer = (k + l + g) * (2 * k + 2 * l + g)
    X = k * (2 * k + g) / outer
    Y = l * (2 * l + g) / outer
    Z2 = g * (2 * k + g) * (2 * l + g) / (2 * k + 2 * l + g) / (k + l + g) ** 2
    return float(-xlogy(k, X) - xlogy(l, Y) - 0.5 * xlogy(g, Z2))


def rate_A(q: RateQuery, form: str = 'xyz') -> float:
    """lim N^-1 ln A(kappa N, lambda N, gamma N)."""
    if form == 'xyz':
        return _rate_xyz(q.kappa, q.lam, q.gamma)
    if form == 'hform':
        rho = q.rho
        total = q.kappa + q.lam
        theta = q.kappa / total
        mixed = (1 + rho) / (1 + 2 * rho) * theta + rho / (1 + 2 * rho) * (q.lam / total)
        per_total = (2 * math.log(2) - psi(1 + rho) + psi(rho)
                     + h(theta) - h(0.5)
                     + (1 + 2 * rho) * (h(mixed) - h(0.5)))
        return total * per_total
    if form == 'symmetric':
        if q.kappa != q.lam:
            raise DomainError("symmetric form requires kappa == lambda")
        rho = q.rho_symmetric
        per_2k = 2 * math.log(2) + (1 + rho) * math.log1p(rho) - float(xlogy(rho, rho))
        return 2 * q.kappa * per_2k
    raise DomainError(f"form must be one of {FORMS}, got {form!r}")


def hform_corrections(q: RateQuery) -> Tuple[float, float]:
    """The two lines of the h-form that vanish when kappa == lambda."""
    rho = q.rho
    total = q.kappa + q.lam
    theta = q.kappa / total
    mixed = (1 + rho) / (1 + 2 * rho) * theta + rho / (1 + 2 * rho) * (q.lam / total)
    return h(theta) - h(0.5), (1 + 2 * rho) * (h(mixed) - h(0.5))


def varadhan_objective(g: float, kappa: float, lam: float) -> float:
    """Rate of the j = g n^1/2 term of E[Z_{n,k} Z_{n,l}], per n^1/2."""
    c = kappa + lam - g
    return 2.0 * c * (1.0 - math.log(c)) + _rate_xyz(kappa - g, lam - g, g)


def varadhan_second_moment(kappa: float, lam: float) -> Tuple[float, float]:
    """Maximize the per-term rate over g in (0, min(kappa, lambda)).

    A coarse grid locates the best cell; golden-section search on the
    bracketing triple refines to |dg| < 1e-10 (a boundary maximum keeps the
    grid point). Returns (value, gamma_star).
    """
    if kappa <= 0 or lam <= 0:
        raise DomainError("kappa and lambda must be positive")
    upper = min(kappa, lam)
    grid = np.linspace(0.0, upper, VARADHAN_GRID)
    values = np.array([varadhan_objective(g, kappa, lam) for g in grid])
    best = int(np.argmax(values))
    gamma_star, value = float(grid[best]), float(values[best])
    if 0 < best < len(grid) - 1:
        res = optimize.minimize_scalar(
            lambda g: -varadhan_objective(g, kappa, lam),
            bracket=(grid[best - 1], grid[best], grid[best + 1]),
            method='golden', options={'xtol': 1e-10},
        )
        if -res.fun >= value:
            gamma_star, value = float(res.x), float(-res.fun)
    logger.debug("varadhan(%g, %g): value %.12g at gamma %.10g", kappa, lam, value, gamma_star)
    return value, gamma_star


def solve_P_symmetric(kappa: float) -> float:
    """Root in (0, 1/4) of 8P / ((1-2P)(1-4P)) = kappa."""
    if kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}")

    def residual(P: float) -> float:
        return 8 * P - kappa * (1 - 2 * P) * (1 - 4 * P)

    return bisect_root(residual, 0.0, 0.25, name="symmetric P")


def _symmetric_printed_forms(kappa: float, P: float) -> Tuple[float, float]:
    first = 2 - 4 * P - 6 * math.log(2) + math.log(1 - 4 * P) - 2 * math.log(P)
    second = (first_moment_rate(kappa) / kappa
              - 4 * P - 2 * math.log(1 - 2 * P) - math.log(1 - 4 * P))
    return first, second


def ld_second_moment_printed(kappa: float, with_oracle: bool = True) -> RateResult:
    """Printed symmetric second-moment rate, per n^1/2 (the printed form times 2 kappa)."""
    P = solve_P_symmetric(kappa)
    first, _ = _symmetric_printed_forms(kappa, P)
    result = RateResult(printed_value=2 * kappa * first, P=P)
    if with_oracle:
        result.attach_oracle(*varadhan_second_moment(kappa, kappa))
    return result


def printed_forms_gap(kappa: float) -> float:
    """Difference between the two printed forms of the symmetric rate."""
    first, second = _symmetric_printed_forms(kappa, solve_P_symmetric(kappa))
    return abs(first - second)


def _angles(kappa: float, lam: float) -> Tuple[float, float, float]:
    total = kappa + lam
    sin2 = lam / total
    cos2 = kappa / total
    return sin2, cos2, cos2 - sin2


def solve_P_mixed(kappa: float, lam: float) -> float:
    """Root in (0, sin^2(theta)/2) of the asymmetric implicit equation, lambda <= kappa."""
    if kappa <= 0 or lam <= 0:
        raise DomainError("kappa and lambda must be positive")
    if lam > kappa:
        kappa, lam = lam, kappa
    sin2, cos2, c2t = _angles(kappa, lam)
    target = 4.0 * math.log((kappa + lam) / 4.0)

    def residual(P: float) -> float:
        a = (1 - 2 * P) ** 2 - c2t ** 2
        b = (1 - 4 * P) ** 2 - c2t ** 2
        if a <= 0 or b <= 0:
            return math.inf
        log_rhs = (math.log(P) + 3 * math.log(1 - 3 * P)
                   - 2 * math.log(1 - 2 * P) - math.log(a) - 2 * math.log(b))
        return log_rhs - target

    return bisect_root(residual, 0.0, sin2 / 2.0, name="asymmetric P")


def ld_mixed_printed(kappa: float, lam: float, with_oracle: bool = True) -> RateResult:
    """Printed asymmetric second-moment rate, per n^1/2 (printed form times kappa+lambda)."""
    P = solve_P_mixed(kappa, lam)
    k, l = (kappa, lam) if lam <= kappa else (lam, kappa)
    sin2, cos2, c2t = _angles(k, l)
    per_total = (2 * (1 - 2 * P) - 2 * math.log(2)
                 - 0.5 * math.log(P) - 0.5 * math.log(1 - 3 * P) - 2 * P * math.log(1 - 4 * P)
                 + 0.5 * c2t * math.log((2 * sin2 - 2 * P) / (2 * cos2 - 2 * P))
                 + sin2 * math.log(2 * cos2 - 4 * P)
                 + cos2 * math.log(2 * sin2 - 4 * P))
    result = RateResult(printed_value=(k + l) * per_total, P=P)
    if with_oracle:
        result.attach_oracle(*varadhan_second_moment(kappa, lam))
    return result


def symmetric_foc_residual(kappa: float, g: float) -> float:
    """ln((2k-g)^4 (k-g)^4) - ln(g (4k-3g)^3); zero at the symmetric optimizer."""
    return (4 * math.log(2 * kappa - g) + 4 * math.log(kappa - g)
            - math.log(g) - 3 * math.log(4 * kappa - 3 * g))


def asymmetric_foc_residual(kappa: float) -> Tuple[float, float]:
    """At kappa == lambda, map the asymmetric P to g = 4 P kappa.

    Returns (first-order-condition residual at g, g).
    """
    P = solve_P_mixed(kappa, kappa)
    g = 4 * P * kappa
    return symmetric_foc_residual(kappa, g), g


def appendixD_saddle(kappa: float, gamma: float, N: int) -> AppendixDSaddle:
    """Saddle radii t_N, s_N for A(kappa N, kappa N, gamma N) and the scaling of 1/D."""
    if kappa <= 0 or gamma <= 0 or N < 1:
        raise DomainError("need kappa, gamma > 0 and N >= 1")
    w = 4 * kappa + gamma
    t_star = kappa / w
    s_star = math.sqrt(gamma / w)
    t_N = t_star - kappa / w ** 2 / N
    s_N = s_star - (2 * kappa + gamma) / (math.sqrt(gamma) * w ** 1.5) / N
    root = math.sqrt(1 - 4 * t_N)
    bbD = root - s_N
    calN = root + s_N
    calD = 1 - 4 * t_N - s_N ** 2
    k_N, j_N = kappa * N, gamma * N
    ldr1_finite = (-2 * k_N * math.log(t_N) - j_N * math.log(s_N) - math.log(bbD)) / N
    return AppendixDSaddle(
        kappa=kappa, gamma=gamma, N=N, t_star=t_star, s_star=s_star,
        t_N=t_N, s_N=s_N, bbD=bbD, calN=calN, calD=calD,
        scaled_calD=N * calD * w / 2.0,
        scaled_bbD=bbD * math.sqrt(gamma * w) * N,
        ldr1_finite=ldr1_finite,
        ldr1_limit=-2 * kappa * math.log(t_star) - gamma * math.log(s_star),
        rate_xyz=rate_A(RateQuery(kappa, kappa, gamma), 'xyz'),
    )


def multinomial_stirling_check(parts: Sequence[int]) -> float:
    """exact multinomial / Stirling asymptotic, computed in logs."""
    if not parts or any(p < 1 for p in parts):
        raise DomainError("parts must all be >= 1")
    total = sum(parts)
    log_exact = math.log(multinomial(parts))
    log_asym = (-(len(parts) - 1) / 2 * math.log(2 * math.pi)
                + (total + 0.5) * math.log(total)
                - sum((p + 0.5) * math.log(p) for p in parts))
    return math.exp(log_exact - log_asym)


def array_convergence(Ns: Sequence[int], kappa: float = 1.0, lam: float = 1.0,
                      gamma: float = 1.0) -> List[Dict[str, float]]:
    """(1/N) ln A(kN, lN, gN) against rate_A for each N."""
    target = rate_A(RateQuery(kappa, lam, gamma), 'xyz')
    rows = []
    for N in Ns:
        value = comb_A(round(kappa * N), round(lam * N), round(gamma * N), LOGSPACE)
        estimate = value.logmag / N
        rows.append({'N': N, 'estimate': estimate, 'rate': target,
                     'abs_err': abs(estimate - target)})
    return rows


def second_moment_convergence(ns: Sequence[int], kappa: float = 1.0,
                              lam: float = 1.0) -> List[Dict[str, float]]:
    """n^-1/2 ln E[Z_{n,k} Z_{n,l}] against the Varadhan value, with the dominant j."""
    target, gamma_star = varadhan_second_moment(kappa, lam)
    rows = []
    for n in ns:
        root = math.sqrt(n)
        k, l = int(math.floor(kappa * root)), int(math.floor(lam * root))
        moment = second_moment_log(n, k, l)
        estimate = moment.log_value / root
        j_star = argmax_j(moment.per_j_log_terms)
        rows.append({'n': n, 'estimate': estimate, 'rate': target,
                     'abs_err': abs(estimate - target),
                     'j_star': j_star, 'gamma_hat': j_star / root,
                     'gamma_star': gamma_star})
    return rows
