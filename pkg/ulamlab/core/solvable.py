"""
The exactly solvable small-sums model.

N_{n,k}(t) counts k-subsets of n iid Exp(1) variables whose sum is at most
t. Its first moment is exact; higher moments are evaluated under the
replica-symmetric ansatz, and the replica-to-zero continuation is compared
with counts of partitions into distinct parts.

Replica values are ansatz values: nothing here certifies them.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, optimize
from scipy.special import gammainc

from ..utils.config import get_config
from .errors import DomainError, InfeasibleTargetError, ResourceCapError, UlamlabError
from .numkernel import binomial
from .roots import bisect_root

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
PI2_6 = math.pi ** 2 / 6.0
MC_BATCH = 2000

__all__ = [
    'ReplicaSolution', 'PartitionTables', 'expect_N', 'mc_N', 'f_m',
    'f_m_integral', 'solve_z', 'replica_moment_ld', 'replica_constrained_sum',
    'first_moment_ld', 'dilog', 'replica_ratio', 'replica_to_zero',
    'partition_counts', 'partition_trend', 'poisson_ld', 'poisson_ld_check',
]


@dataclass
class ReplicaSolution:
    m: int
    t: float
    kappa: float
    z: float
    kappa_l: List[float] = field(default_factory=list)
    tau_l: List[float] = field(default_factory=list)
    ld_value: float = math.nan

    def constraint_residuals(self) -> Tuple[float, float]:
        """(sum C(m-1,l-1) kappa_l - kappa, sum C(m-1,l-1) tau_l - t)"""
        weights = [binomial(self.m - 1, l - 1) for l in range(1, self.m + 1)]
        return (math.fsum(w * k for w, k in zip(weights, self.kappa_l)) - self.kappa,
                math.fsum(w * s for w, s in zip(weights, self.tau_l)) - self.t)


@dataclass
class PartitionTables:
    max_n: int
    max_k: int
    rho: List[List[int]]
    p: List[List[int]]


def expect_N(n: int, k: int, t: float) -> float:
    """C(n, k) P(Gamma(k, 1) <= t)."""
    if not 1 <= k <= n or t < 0:
        raise DomainError(f"need 1 <= k <= n and t >= 0, got n={n}, k={k}, t={t}")
    return binomial(n, k) * float(gammainc(k, t))


def _count_small_sums(sorted_x: np.ndarray, k: int, t: float, node_cap: int) -> np.ndarray:
    """Per-row count of k-subsets with sum <= t; rows sorted ascending.

    Expands a frontier of (row, last index, partial sum) one level at a time
    and drops partial tuples whose cheapest completion already exceeds t.
    """
    rows, n = sorted_x.shape
    prefix = np.zeros((rows, n + 1))
    np.cumsum(sorted_x, axis=1, out=prefix[:, 1:])
    row = np.arange(rows)
    last = np.full(rows, -1)
    partial = np.zeros(rows)
    for depth in range(k):
        remaining = k - depth - 1
        counts = np.maximum(n - remaining - 1 - last, 0)
        total = int(counts.sum())
        if total > node_cap:
            raise ResourceCapError("small-sum search nodes per batch", total, node_cap)
        if total == 0:
            return np.zeros(rows, dtype=np.int64)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        row = np.repeat(row, counts)
        nxt = np.repeat(last + 1, counts) + (np.arange(total) - starts)
        partial = np.repeat(partial, counts) + sorted_x[row, nxt]
        completion = prefix[row, nxt + 1 + remaining] - prefix[row, nxt + 1]
        keep = partial + completion <= t
        row, last, partial = row[keep], nxt[keep], partial[keep]
    return np.bincount(row, minlength=rows)


def mc_N(n: int, k: int, t: float, samples: int, seed: int) -> Tuple[float, float]:
    """Monte Carlo mean and standard error of N_{n,k}(t).

    Samples are split into fixed-size shards, each with its own stream
    spawned from one SeedSequence, so results do not depend on the thread
    count.
    """
    config = get_config()
    max_n, max_k = int(config.get('mc_max_n')), int(config.get('mc_max_k'))
    if n > max_n:
        raise ResourceCapError("monte carlo n", n, max_n)
    if k > max_k:
        raise ResourceCapError("monte carlo k", k, max_k)
    if not 1 <= k <= n or samples < 2:
        raise DomainError("need 1 <= k <= n and at least two samples")
    node_cap = int(config.get('mc_node_cap'))
    sizes = [MC_BATCH] * (samples // MC_BATCH)
    if samples % MC_BATCH:
        sizes.append(samples % MC_BATCH)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))

    def shard(args) -> np.ndarray:
        size, stream = args
        rng = np.random.default_rng(stream)
        x = np.sort(rng.exponential(size=(size, n)), axis=1)
        return _count_small_sums(x, k, t, node_cap)

    threads = max(1, int(config.get('threads')))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(shard, zip(sizes, streams)))
    else:
        parts = [shard(job) for job in zip(sizes, streams)]
    counts = np.concatenate(parts).astype(float)
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / math.sqrt(samples))
    logger.debug("mc_N(%d, %d, %g): %d samples, mean %.6g +- %.3g", n, k, t, samples, mean, stderr)
    return mean, stderr


def f_m(m: Union[int, float], z: float) -> float:
    """int_0^z ((1+y)^m - 1) / y dy, by the finite sum for integer m."""
    if z <= 0:
        raise DomainError(f"z must be positive, got {z}")
    if float(m).is_integer() and m >= 1:
        m = int(m)
        return math.fsum(binomial(m, l) * z ** l / l for l in range(1, m + 1))
    return f_m_integral(m, z)


def f_m_integral(m: float, z: float) -> float:
    value, _ = integrate.quad(lambda y: math.expm1(m * math.log1p(y)) / y if y > 0 else m,
                              0.0, z, epsabs=0.0, epsrel=1e-13, limit=200)
    return value


def _z_lhs(m: int, z: float) -> float:
    return math.expm1(m * math.log1p(z)) / math.sqrt(f_m(m, z))


def solve_z(m: int, kappa: float, t: float) -> ReplicaSolution:
    """Solve ((1+z)^m - 1)/sqrt(f_m(z)) = kappa sqrt(m/t) and fill kappa_l, tau_l."""
    if m < 1 or kappa <= 0 or t <= 0:
        raise DomainError(f"need m >= 1 and kappa, t > 0, got m={m}, kappa={kappa}, t={t}")
    target = kappa * math.sqrt(m / t)
    if m == 1:
        z = kappa * kappa / t
    else:
        lo, hi = -50.0, 1.0
        while _z_lhs(m, math.exp(hi)) < target:
            hi *= 2.0
            if hi > 700:
                raise InfeasibleTargetError("z equation has no root in range", target, math.inf)
        u = bisect_root(lambda u: _z_lhs(m, math.exp(u)) - target, lo, hi,
                        name="replica z", open_ends=False, xtol=1e-15)
        z = math.exp(u)
    fm = f_m(m, z)
    scale_k = math.sqrt(m * t / fm)
    scale_t = m * t / fm
    sol = ReplicaSolution(
        m=m, t=t, kappa=kappa, z=z,
        kappa_l=[scale_k * z ** l / l for l in range(1, m + 1)],
        tau_l=[scale_t * z ** l / l ** 2 for l in range(1, m + 1)],
    )
    sol.ld_value = replica_moment_ld(sol)
    return sol


def replica_moment_ld(sol: ReplicaSolution) -> float:
    """Ansatz value of lim n^-1/2 ln E[N^m]: sqrt(m t / f) (2 f - ln z ((1+z)^m - 1))."""
    fm = f_m(sol.m, sol.z)
    return math.sqrt(sol.m * sol.t / fm) * (2 * fm - math.log(sol.z) * math.expm1(sol.m * math.log1p(sol.z)))


def replica_constrained_sum(sol: ReplicaSolution) -> float:
    """sum_l C(m, l) kappa_l (2 - 2 ln kappa_l + ln tau_l) at the critical point."""
    return math.fsum(
        binomial(sol.m, l) * k * (2 - 2 * math.log(k) + math.log(tau))
        for l, (k, tau) in enumerate(zip(sol.kappa_l, sol.tau_l), start=1)
    )


def first_moment_ld(kappa: float, t: float) -> float:
    """lim n^-1/2 ln E[N_{n,k}(t)] = kappa (2 - 2 ln kappa + ln t)."""
    return kappa * (2 - 2 * math.log(kappa) + math.log(t))


def _li2_series(x: float) -> float:
    total, power, l = 0.0, x, 1
    while True:
        term = power / (l * l)
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300):
            return total
        l += 1
        power *= x


def _li2_unit(y: float, one_minus_y: float) -> float:
    """Li2 on [-1/2, 1), reflecting through 1 - y above 1/2."""
    if y <= 0.5:
        return _li2_series(y)
    return PI2_6 - math.log1p(-one_minus_y) * math.log(one_minus_y) - _li2_series(one_minus_y)


def dilog(x: float) -> float:
    """Spence's dilogarithm Li2(x) = sum x^l / l^2, for x <= 1."""
    if x > 1:
        raise DomainError(f"dilog needs x <= 1, got {x}")
    if x == 1:
        return PI2_6
    if x < -0.5:
        # Landen: Li2(x) = -Li2(x/(x-1)) - ln(1-x)^2 / 2
        w = 1.0 - x
        return -_li2_unit((w - 1.0) / w, 1.0 / w) - 0.5 * math.log(w) ** 2
    return _li2_unit(x, 1.0 - x)


def replica_ratio(z: float) -> float:
    """ln(1+z) / sqrt(-Li2(-z)), increasing from 0 toward sqrt(2)."""
    return math.log1p(z) / math.sqrt(-dilog(-z))


def _neg_li2_neg_exp(u: float) -> float:
    """-Li2(-e^u); inverted through Li2(-x) + Li2(-1/x) = -pi^2/6 - ln(x)^2/2 for u > 0."""
    if u <= 0:
        return -dilog(-math.exp(u))
    return PI2_6 + 0.5 * u * u + dilog(-math.exp(-u))


def _log1p_exp(u: float) -> float:
    if u <= 0:
        return math.log1p(math.exp(u))
    return u + math.log1p(math.exp(-u))


def _replica_ratio_log(u: float) -> float:
    return _log1p_exp(u) / math.sqrt(_neg_li2_neg_exp(u))


def replica_to_zero(kappa: float, t: float) -> Tuple[float, float]:
    """Replica-to-zero prediction for lim n^-1/2 E[ln N_{n,k}(t)] (an ansatz value).

    Solved in u = ln z, so targets just below sqrt(2) stay reachable; z is
    reported as inf once e^u overflows.
    """
    if kappa <= 0 or t <= 0:
        raise DomainError("kappa and t must be positive")
    target = kappa / math.sqrt(t)
    if target >= SQRT2:
        raise InfeasibleTargetError(
            "no partitions into distinct parts when kappa/sqrt(t) >= sqrt(2)", target, SQRT2)
    lo, hi = -600.0, 1.0
    while _replica_ratio_log(hi) < target:
        hi *= 2.0
        if hi > 1e12:
            raise InfeasibleTargetError("replica-to-zero target too close to sqrt(2)", target, SQRT2)
    u = bisect_root(lambda u: _replica_ratio_log(u) - target, lo, hi,
                    name="replica-to-zero z", open_ends=False, xtol=1e-14)
    neg_li2 = _neg_li2_neg_exp(u)
    if u <= 0:
        bracket = 2 * neg_li2 - u * _log1p_exp(u)
    else:
        # u^2 cancels between 2(-Li2) and u ln(1+z)
        tail = math.exp(-u)
        bracket = 2 * PI2_6 + 2 * dilog(-tail) - u * math.log1p(tail)
    z = math.exp(u) if u < 709.0 else math.inf
    return z, math.sqrt(t / neg_li2) * bracket


def _rho_table(max_n: int, max_k: int) -> List[List[int]]:
    rho = [[0] * (max_k + 1) for _ in range(max_n + 1)]
    rho[0][0] = 1
    for n in range(1, max_n + 1):
        for k in range(1, max_k + 1):
            if n >= k:
                rho[n][k] = rho[n - k][k] + rho[n - k][k - 1]
    return rho


def partition_counts(max_n: int, max_k: int) -> PartitionTables:
    """rho(n, k) into distinct parts and p(n, k) into arbitrary parts."""
    cells = (max_n + 1) * (max_k + 1)
    cap = int(get_config().get('partition_max_cells'))
    if cells > cap:
        raise ResourceCapError("partition table cells", cells, cap)
    p = [[0] * (max_k + 1) for _ in range(max_n + 1)]
    p[0][0] = 1
    for n in range(1, max_n + 1):
        for k in range(1, max_k + 1):
            p[n][k] = p[n - 1][k - 1] + (p[n - k][k] if n >= k else 0)
    tables = PartitionTables(max_n, max_k, _rho_table(max_n, max_k), p)
    for n in range(max_n + 1):
        for k in range(max_k + 1):
            shifted = n - k * (k - 1) // 2
            expected = p[shifted][k] if shifted >= 0 else 0
            if tables.rho[n][k] != expected:
                raise UlamlabError(f"rho({n},{k}) != p({shifted},{k})")
    return tables


def partition_trend(kappa: float, t: float, ns: Sequence[int]) -> List[Dict[str, float]]:
    """(1/sqrt(n)) ln rho(t n, kappa sqrt(n)) beside the replica-to-zero value."""
    _, target = replica_to_zero(kappa, t)
    sizes = [(int(t * n), int(kappa * math.sqrt(n))) for n in ns]
    rho = _rho_table(max(s[0] for s in sizes), max(s[1] for s in sizes))
    rows = []
    for n, (total, parts) in zip(ns, sizes):
        count = rho[total][parts]
        scaled = math.log(count) / math.sqrt(n) if count else -math.inf
        rows.append({'n': n, 'rho': count, 'scaled': scaled, 'replica_value': target})
    return rows


def poisson_ld(kappa: float, t: float) -> float:
    return kappa * math.log(t / kappa) - t + kappa


def poisson_ld_check(kappa: float) -> float:
    """Maximum over t of kappa ln(t/kappa) - t + kappa; attained at t = kappa with value 0."""
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    grid = np.geomspace(kappa / 100.0, kappa * 100.0, 401)
    best = int(np.argmax([poisson_ld(kappa, s) for s in grid]))
    lo, hi = grid[max(best - 1, 0)], grid[min(best + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(lambda s: -poisson_ld(kappa, s), bounds=(lo, hi),
                                   method='bounded', options={'xatol': 1e-12 * kappa})
    value = float(-res.fun)
    if abs(res.x - kappa) > 1e-5 * kappa or abs(value) > 1e-10:
        raise UlamlabError(f"poisson maximum at t={res.x!r} value {value!r}, expected t={kappa}")
    return value
