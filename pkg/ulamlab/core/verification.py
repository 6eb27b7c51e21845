"""
Verification Runner - Cross-checks every computable object against an
independent oracle and collects the outcomes as report records.

Each suite pairs a formula with something that does not share its code
path: permutation enumeration for the moment formulas, lattice walks for
the array A, exact series arithmetic for the generating functions, the
truncated series and a circle integral for the elliptic closed form, the
Varadhan optimizer for the printed rate formulas, and Monte Carlo for the
solvable model.

Printed closed forms that disagree with their oracle are reported with
status ``discrepancy``. Discrepancies are findings, not failures; only a
``fail`` makes the run exit nonzero.
"""

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Callable, Dict, Iterable, Iterator, List, Sequence

import mpmath
import numpy as np
from scipy import integrate, special

from ..utils.config import Config, set_config
from ..utils.logger import Logger
from ..utils.output import write_json
from . import elliptic3, genfun, perm_oracle, ratefun, solvable, ulam_exact
from .errors import InfeasibleTargetError, UlamlabError

REPORT_SCHEMA = 'ulamlab-report-v1'
SUITES = ('exact', 'gf', 'elliptic', 'rates', 'solvable')
STATUSES = ('pass', 'fail', 'discrepancy')

PRINTED_TOL = 1e-6
ANSATZ = 'replica-symmetric ansatz value'


@dataclass
class VerificationRecord:
    check_id: str
    status: str
    lhs: object
    rhs: object
    abs_err: float
    rel_err: float
    tolerance: float
    normalization: str = ''
    notes: str = ''


def _as_field(value) -> object:
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _compare(check_id: str, lhs: float, rhs: float, tol: float, relative: bool = False,
             normalization: str = '', notes: str = '') -> VerificationRecord:
    """Numeric comparison; pass iff the (relative) error is within tol."""
    lhs, rhs = float(lhs), float(rhs)
    abs_err = abs(lhs - rhs)
    rel_err = abs_err / abs(rhs) if rhs else abs_err
    ok = (rel_err if relative else abs_err) <= tol
    return VerificationRecord(check_id, 'pass' if ok else 'fail', lhs, rhs, abs_err,
                              rel_err, tol, normalization, notes)


def _exact(check_id: str, lhs, rhs, notes: str = '') -> VerificationRecord:
    """Exact equality of integers, rationals or booleans."""
    ok = lhs == rhs
    if isinstance(lhs, bool) or isinstance(rhs, bool):
        abs_err = 0.0 if ok else 1.0
    else:
        abs_err = float(abs(Fraction(lhs) - Fraction(rhs)))
    rel_err = abs_err / abs(float(rhs)) if rhs and not isinstance(rhs, bool) else abs_err
    return VerificationRecord(check_id, 'pass' if ok else 'fail', _as_field(lhs),
                              _as_field(rhs), abs_err, rel_err, 0.0, 'exact', notes)


def _holds(check_id: str, condition: bool, lhs, rhs, notes: str = '') -> VerificationRecord:
    """A qualitative property (ordering, monotonicity); lhs and rhs are the evidence."""
    return VerificationRecord(check_id, 'pass' if condition else 'fail', _as_field(lhs),
                              _as_field(rhs), 0.0, 0.0, 0.0, 'property', notes)


def _printed(check_id: str, result: ratefun.RateResult, notes: str) -> VerificationRecord:
    """Printed formula against the Varadhan oracle; a mismatch is a discrepancy."""
    record = _compare(check_id, result.printed_value, result.oracle_value, PRINTED_TOL,
                      normalization=result.normalization,
                      notes=f"{notes}; oracle gamma* = {result.optimizer_gamma:.10g}; P = {result.P:.12g}")
    if record.status == 'fail':
        record.status = 'discrepancy'
    return record


def _strictly_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def _strictly_increasing(values: Sequence[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


class VerificationRunner:
    """
    Runs the cross-validation suites and writes the verification report.

    Suites are independent groups of checks. Every check compares a value
    produced by one code path with a value produced by another and turns the
    outcome into a ``VerificationRecord``:

    - exact: moment formulas against permutation enumeration, A against
      lattice walks and composition sums, Hölder and all-or-nothing bounds
    - gf: generating-function coefficients against the arrays, contour
      quadrature against closed forms, the diagonal singularity
    - elliptic: the elliptic closed form of M3 against its series and a
      circle integral, root and modulus identities
    - rates: rate-function forms against each other, exact log-moments
      against their limits, printed formulas against the Varadhan oracle
    - solvable: Monte Carlo against exact means, replica identities,
      the dilogarithm, partition tables

    A check that raises ``UlamlabError`` is recorded as ``fail`` with the
    error in its notes; the remaining checks still run.

    Attributes:
        config (Config): Caps and tolerances shared with the core modules
        logger (Logger): Progress and diagnostics, on stderr
    """

    def __init__(self, config: Config, logger: Logger):
        """
        Initialize the runner.

        Args:
            config (Config): Configuration with enumeration caps
            logger (Logger): Logging utility for progress messages
        """
        self.config = config
        self.logger = logger
        # core modules read caps from the process-wide config
        set_config(config)
        self._suites: Dict[str, List[Callable[[], Iterable[VerificationRecord]]]] = {
            'exact': [
                self._check_mean_examples,
                self._check_second_moment_vs_enumeration,
                self._check_walk_counts,
                self._check_comb_A_reference,
                self._check_comb_A_symmetry,
                self._check_logspace_vs_exact,
                self._check_moment_bounds,
                self._check_lis,
                self._check_gamma2_identity,
            ],
            'gf': [
                self._check_squared_binomial_series,
                self._check_gf_A,
                self._check_gf_A_tilde,
                self._check_m2_contour,
                self._check_binomial_contour,
                self._check_singularity,
            ],
            'elliptic': [
                self._check_omega_roots,
                self._check_elliptic_K,
                self._check_m3_series,
                self._check_m3_specialization,
                self._check_m3_symmetry,
                self._check_m3_contour,
            ],
            'rates': [
                self._check_rate_forms,
                self._check_first_moment_convergence,
                self._check_array_convergence,
                self._check_second_moment_convergence,
                self._check_varadhan_endpoint,
                self._check_symmetric_P,
                self._check_printed_rates,
                self._check_appendix_saddle,
                self._check_stirling,
            ],
            'solvable': [
                self._check_expectation_vs_mc,
                self._check_replica_m1,
                self._check_replica_constraints,
                self._check_f_m,
                self._check_dilog,
                self._check_replica_to_zero,
                self._check_partitions,
                self._check_poisson,
            ],
        }

    def run(self, suite: str = 'all') -> List[VerificationRecord]:
        """
        Run one suite, or all of them in a fixed order.

        Args:
            suite (str): 'all' or one of the names in SUITES

        Returns:
            List[VerificationRecord]: Records in check order
        """
        if suite == 'all':
            names = list(SUITES)
        elif suite in self._suites:
            names = [suite]
        else:
            raise UlamlabError(f"unknown suite {suite!r}; choose all or one of {', '.join(SUITES)}")

        records: List[VerificationRecord] = []
        for name in names:
            self.logger.info(f"Running suite {name}")
            with self.logger.timed(f"suite {name}"):
                records.extend(self._run_suite(name))
        return records

    def _run_suite(self, name: str) -> List[VerificationRecord]:
        records: List[VerificationRecord] = []
        for check in self._suites[name]:
            label = check.__name__.replace('_check_', '')
            try:
                produced = list(check())
            except UlamlabError as e:
                self.logger.warning(f"{name}.{label} raised: {e}")
                produced = [VerificationRecord(f"{name}.{label}", 'fail', None, None,
                                               math.nan, math.nan, 0.0, '',
                                               f"{type(e).__name__}: {e}")]
            for record in produced:
                self.logger.debug(f"{record.check_id}: {record.status}")
            records.extend(produced)
        return records

    @staticmethod
    def summarize(records: Sequence[VerificationRecord]) -> Dict[str, int]:
        counts = {status: 0 for status in STATUSES}
        for record in records:
            counts[record.status] += 1
        return counts

    @staticmethod
    def exit_code(records: Sequence[VerificationRecord]) -> int:
        """0 iff no record failed; discrepancies do not fail the run."""
        return 1 if any(r.status == 'fail' for r in records) else 0

    def write_report(self, records: Sequence[VerificationRecord], out: str, suite: str = 'all'):
        """
        Write the JSON report.

        Args:
            records (Sequence[VerificationRecord]): Outcomes of ``run``
            out (str): Destination path; an empty path is an I/O error
            suite (str): Suite name recorded in the report

        Raises:
            OSError: If the path is empty or cannot be written
        """
        payload = {
            'schema': REPORT_SCHEMA,
            'suite': suite,
            'summary': self.summarize(records),
            'records': [asdict(r) for r in records],
        }
        write_json(payload, out)
        self.logger.info(f"Wrote {len(records)} records to {out}")

    # exact

    def _check_mean_examples(self) -> Iterator[VerificationRecord]:
        yield _exact('exact.second_moment_3_2_2', ulam_exact.second_moment(3, 2, 2).value,
                     Fraction(19, 6))
        yield _exact('exact.mean_3_2_vs_enumeration', ulam_exact.mean_Z(3, 2),
                     perm_oracle.brute_moments(3, [2], 1))
        yield _exact('exact.second_moment_n_1_1', ulam_exact.second_moment(9, 1, 1).value, 81,
                     notes="Z_{n,1} is the constant n")

    def _check_second_moment_vs_enumeration(self) -> Iterator[VerificationRecord]:
        for n in range(1, 8):
            table = perm_oracle.brute_moment_table(n)
            mismatched = [
                (k, l) for (k, l), brute in sorted(table.items())
                if ulam_exact.second_moment(n, k, l).value != brute
            ]
            yield _exact(f"exact.second_moment_vs_enumeration.n{n}", len(mismatched), 0,
                         notes=f"{n * n} pairs; mismatches {mismatched[:5]}")

    def _check_walk_counts(self) -> Iterator[VerificationRecord]:
        mismatched = []
        checked = 0
        for k in range(9):
            for l in range(9 - k):
                for j in range(min(k, l) + 3):
                    checked += 1
                    if perm_oracle.walk_count_A(k, l, j) != ulam_exact.comb_A(k, l, j):
                        mismatched.append((k, l, j))
        yield _exact('exact.walk_count_vs_comb_A', len(mismatched), 0,
                     notes=f"{checked} cases with t_j pinned to k+l; mismatches {mismatched[:5]}")
        yield _exact('exact.walk_count_A_1_0_0', perm_oracle.walk_count_A(1, 0, 0),
                     ulam_exact.comb_A(1, 0, 0))
        yield _exact('exact.walk_count_unpinned_1_0_0', perm_oracle.walk_count_unpinned(1, 0, 0), 2,
                     notes="without t_j = k+l the count is 2, not A(1,0,0) = 1")

    def _check_comb_A_reference(self) -> Iterator[VerificationRecord]:
        mismatched = [
            (k, l, j)
            for k in range(9) for l in range(9 - k) for j in range(9 - k - l)
            if ulam_exact.comb_A(k, l, j) != ulam_exact.comb_A_reference(k, l, j)
        ]
        yield _exact('exact.comb_A_vs_composition_sum', len(mismatched), 0,
                     notes=f"k+l+j <= 8; mismatches {mismatched[:5]}")
        yield _exact('exact.comb_A_1_1_1', ulam_exact.comb_A(1, 1, 1), 10)

    def _check_comb_A_symmetry(self) -> Iterator[VerificationRecord]:
        slices = ulam_exact.comb_A_slices(12, 12, 12)
        asymmetric = [s.j for s in slices if not np.array_equal(s.values, s.values.T)]
        yield _exact('exact.comb_A_symmetry', len(asymmetric), 0, notes="k, l, j <= 12")
        tilde = [
            (k, l, j) for k in range(5) for l in range(5) for j in range(5)
            if ulam_exact.comb_A_tilde(2, (k, l), j) != ulam_exact.comb_A(k, l, j)
        ]
        yield _exact('exact.comb_A_tilde_r2', len(tilde), 0, notes="k, l, j <= 4")

    def _check_logspace_vs_exact(self) -> Iterator[VerificationRecord]:
        exact = ulam_exact.comb_A_slices(20, 20, 20, ulam_exact.EXACT)
        logs = ulam_exact.comb_A_slices(20, 20, 20, ulam_exact.LOGSPACE)
        worst = 0.0
        for e_slice, l_slice in zip(exact, logs):
            for a in range(21):
                for b in range(21):
                    reference = math.log(int(e_slice.values[a, b]))
                    worst = max(worst, abs(math.expm1(float(l_slice.values[a, b]) - reference)))
        yield _compare('exact.logspace_vs_exact', worst, 0.0, 1e-8,
                       normalization='relative error', notes="k, l, j <= 20")

    def _check_moment_bounds(self) -> Iterator[VerificationRecord]:
        identity, bound, holder = [], [], []
        for n in range(1, 8):
            second = perm_oracle.brute_power_moments(n, 2)
            third = perm_oracle.brute_power_moments(n, 3)
            for k in range(1, n + 1):
                if ulam_exact.all_or_nothing_bound(n, k, 2) != ulam_exact.second_moment(n, k, k).value:
                    identity.append((n, k))
                if ulam_exact.all_or_nothing_bound(n, k, 3) > third[k - 1]:
                    bound.append((n, k))
                # E[Z^3]^(1/3) >= E[Z^2]^(1/2), compared exactly
                if third[k - 1] ** 2 < second[k - 1] ** 3:
                    holder.append((n, k))
        yield _exact('exact.bound_r2_is_identity', len(identity), 0, notes=f"n <= 7; {identity[:5]}")
        yield _exact('exact.bound_r3_below_third_moment', len(bound), 0, notes=f"n <= 7; {bound[:5]}")
        yield _exact('exact.holder_third_vs_second', len(holder), 0, notes=f"n <= 7; {holder[:5]}")

    def _check_lis(self) -> Iterator[VerificationRecord]:
        yield _exact('exact.lis_matches_profile',
                     all(perm_oracle.lis_matches_profile(n) for n in range(1, 8)), True)

    def _check_gamma2_identity(self) -> Iterator[VerificationRecord]:
        failures = [(l, m) for l in range(31) for m in range(31 - l)
                    if not perm_oracle.check_gamma2_identity(l, m)]
        yield _exact('exact.gamma2_identity', len(failures), 0, notes="l+m <= 30")

    # gf

    def _check_squared_binomial_series(self) -> Iterator[VerificationRecord]:
        D = 14
        base = genfun.squared_binomial_base(D)
        root = genfun.series_sqrt_reciprocal(base, D)
        wrong = [(a, b) for a in range(D + 1) for b in range(D + 1 - a)
                 if root.coefficient((a, b)) != ulam_exact.comb_A(a, b, 0)]
        yield _exact('gf.squared_binomials', len(wrong), 0, notes=f"a+b <= {D}")
        yield _exact('gf.sqrt_reciprocal_roundtrip',
                     (root * root * base).truncate(D) == genfun.SeriesMV.constant(2, D), True)

    def _check_gf_A(self) -> Iterator[VerificationRecord]:
        D = 12
        gf = genfun.gf_A_coefficients(D)
        slices = ulam_exact.comb_A_slices(D, D, D)
        wrong = [
            (k, l, j) for k in range(D + 1) for l in range(D + 1 - k) for j in range(D + 1 - k - l)
            if gf.coefficient((k, l, j)) != slices[j].value(k, l)
        ]
        yield _exact('gf.gf_A_vs_comb_A', len(wrong), 0, notes=f"k+l+j <= {D}; {wrong[:5]}")
        yield _exact('gf.geometric_structure', genfun.geometric_structure_check(8), True)

    def _check_gf_A_tilde(self) -> Iterator[VerificationRecord]:
        D = 6
        gf = genfun.gf_A_tilde(3, D)
        wrong = [
            exps for exps in product(range(D + 1), repeat=4) if sum(exps) <= D
            and gf.coefficient(exps) != ulam_exact.comb_A_tilde(3, exps[:3], exps[3])
        ]
        yield _exact('gf.gf_A_tilde_r3', len(wrong), 0, notes=f"total degree <= {D}")

    def _check_m2_contour(self) -> Iterator[VerificationRecord]:
        grid = [0.01, 0.02, 0.03, 0.04, 0.05]
        worst = 0.0
        for z1 in grid:
            for z2 in grid:
                value = genfun.diagonal_contour(genfun.m1_closed, genfun.m1_closed,
                                                [math.sqrt(z1), math.sqrt(z2)],
                                                [math.sqrt(z1), math.sqrt(z2)])
                worst = max(worst, abs(value - genfun.m2_closed(z1, z2)))
        yield _compare('gf.m2_contour_vs_closed_form', worst, 0.0, 1e-10, notes="5x5 grid")
        value = genfun.diagonal_contour(genfun.m1_closed, genfun.m1_closed,
                                        [0.1, 0.1], [0.1, 0.1])
        yield _compare('gf.m2_contour_0.01_0.01', value.real, 1 / math.sqrt(0.96), 1e-10)
        value = genfun.diagonal_contour(genfun.m1_closed, genfun.m1_closed,
                                        [math.sqrt(0.3), 0.0], [math.sqrt(0.3), 0.0])
        yield _compare('gf.m2_recovers_m1', value.real, 1 / 0.7, 1e-10)

    def _check_binomial_contour(self) -> Iterator[VerificationRecord]:
        indices = range(31)
        worst, where = 0.0, None
        for k in indices:
            for l in indices:
                exact = math.comb(k + l, k)
                err = abs(genfun.binomial_contour(k, l) - exact) / exact
                if err >= worst:
                    worst, where = err, (k, l)
        yield _compare('gf.binomial_contour', worst, 0.0, 1e-8, normalization='relative error',
                       notes=f"k, l <= 30; worst at {where}")
        yield _compare('gf.binomial_contour_4_2', genfun.binomial_contour(4, 2), 6, 1e-8)

    def _check_singularity(self) -> Iterator[VerificationRecord]:
        r, inside = genfun.singularity_radius_check()
        yield _compare('gf.singular_radius', r, math.sqrt(5) - 2, 1e-14)
        outside = math.sqrt(1 - 4 * r) - (r + 1e-3)
        yield _holds('gf.denominator_sign_change', inside > 0 > outside, inside, outside,
                     notes="at (r, r, r - 1e-6) and (r, r, r + 1e-3)")

    # elliptic

    def _check_omega_roots(self) -> Iterator[VerificationRecord]:
        roots = elliptic3.omega_roots(0.1, 0.1, 0.1)
        yield _compare('elliptic.omega_pp', roots[(1, 1)], 10.0, 1e-12)
        yield _compare('elliptic.omega_pm', roots[(1, -1)], 0.1, 1e-12)
        chain = [roots[(1, -1)], roots[(-1, -1)], 1.0, roots[(-1, 1)], roots[(1, 1)]]
        yield _holds('elliptic.omega_ordering', 0 < chain[0] and _strictly_increasing(chain),
                     chain[0], chain[-1])
        worst_product = worst_residual = worst_quartic = 0.0
        rng = np.random.default_rng(0)
        for x in ((0.1, 0.1, 0.1), (0.05, 0.12, 0.2), (0.3, 0.1, 0.15)):
            roots = elliptic3.omega_roots(*x)
            for sigma in elliptic3.SIGNS:
                worst_product = max(worst_product, abs(roots[(sigma, 1)] * roots[(sigma, -1)] - 1))
                for tau in elliptic3.SIGNS:
                    worst_residual = max(worst_residual,
                                         abs(elliptic3.q_sigma(sigma, *x, roots[(sigma, tau)])))
            omega = rng.uniform(0.0, 1.0, 64)
            split = elliptic3.q_sigma(1, *x, omega) * elliptic3.q_sigma(-1, *x, omega)
            worst_quartic = max(worst_quartic, float(np.max(np.abs(elliptic3.quartic_Q(*x, omega) - split))))
        yield _compare('elliptic.omega_products', worst_product, 0.0, 1e-12)
        yield _compare('elliptic.q_sigma_residual', worst_residual, 0.0, 1e-10)
        yield _compare('elliptic.quartic_factorization', worst_quartic, 0.0, 1e-12)

    def _check_elliptic_K(self) -> Iterator[VerificationRecord]:
        yield _compare('elliptic.K_0', elliptic3.elliptic_K(0.0), math.pi / 2, 1e-15)
        quad, _ = integrate.quad(lambda phi: 1 / math.sqrt(1 - 0.25 * math.sin(phi) ** 2),
                                 0.0, math.pi / 2, epsabs=0.0, epsrel=1e-14)
        yield _compare('elliptic.K_0.5_quadrature', elliptic3.elliptic_K(0.5), quad, 1e-10)
        yield _compare('elliptic.K_0.5_scipy', elliptic3.elliptic_K(0.5), special.ellipk(0.25),
                       1e-13, relative=True)
        values = [elliptic3.elliptic_K(k) for k in np.linspace(0.0, 0.99, 100)]
        yield _holds('elliptic.K_increasing', _strictly_increasing(values), values[0], values[-1])

    def _check_m3_series(self) -> Iterator[VerificationRecord]:
        series, tail = elliptic3.m3_series(0.01, 0.01, 0.01, degree=40)
        yield _compare('elliptic.m3_vs_series', elliptic3.M3_elliptic(0.1, 0.1, 0.1), series, 1e-8,
                       notes=f"degree-40 series, tail bound {tail:.3g}")
        yield _compare('elliptic.m3_origin', elliptic3.M3_elliptic(0.0, 0.0, 0.0), 1.0, 1e-15)

    def _check_m3_specialization(self) -> Iterator[VerificationRecord]:
        near_zero = elliptic3.M3_elliptic(0.2, 0.3, 1e-6)
        closed = float(genfun.m2_closed(0.04, 0.09).real)
        yield _compare('elliptic.x3_to_zero', near_zero, closed, 1e-10,
                       notes="elliptic path at x3 = 1e-6 against the two-variable closed form")
        yield _exact('elliptic.modulus_at_x3_zero', elliptic3.modulus_specialization(0.2, 0.3), 0.0)
        yield _compare('elliptic.kappa_difference_of_squares', elliptic3.kappa_tau(1, 0.1, 0.2, 0.0),
                       elliptic3.kappa_difference_of_squares(0.1, 0.2), 1e-14)

    def _check_m3_symmetry(self) -> Iterator[VerificationRecord]:
        values = [elliptic3.M3_elliptic(*p) for p in permutations((0.05, 0.1, 0.15))]
        yield _compare('elliptic.m3_symmetry', max(values) - min(values), 0.0, 1e-12)

    def _check_m3_contour(self) -> Iterator[VerificationRecord]:
        worst = 0.0
        for x in ((0.1, 0.1, 0.1), (0.05, 0.1, 0.15), (0.15, 0.12, 0.08)):
            worst = max(worst, abs(elliptic3.m3_contour(*x) - elliptic3.M3_elliptic(*x)))
        yield _compare('elliptic.m3_contour', worst, 0.0, 1e-8)

    # rates

    def _check_rate_forms(self) -> Iterator[VerificationRecord]:
        grid = np.linspace(0.2, 3.0, 10)
        hform = variety = 0.0
        for k, l, g in product(grid, repeat=3):
            q = ratefun.RateQuery(float(k), float(l), float(g))
            hform = max(hform, abs(ratefun.rate_A(q, 'xyz') - ratefun.rate_A(q, 'hform')))
            variety = max(variety, abs(ratefun.saddle_XYZ(q).variety_residual()))
        yield _compare('rates.xyz_vs_hform', hform, 0.0, 1e-10, normalization=ratefun.ARRAY_NORMALIZATION,
                       notes="10x10x10 grid on [0.2, 3]")
        yield _compare('rates.variety_residual', variety, 0.0, 1e-12,
                       notes="Z^2 = 1 - 2(X+Y) + (X-Y)^2")
        symmetric = corrections = 0.0
        for k, g in product(grid, repeat=2):
            q = ratefun.RateQuery(float(k), float(k), float(g))
            xyz = ratefun.rate_A(q, 'xyz')
            symmetric = max(symmetric, abs(xyz - ratefun.rate_A(q, 'symmetric')),
                            abs(ratefun.rate_A(q, 'hform') - ratefun.rate_A(q, 'symmetric')))
            corrections = max(corrections, *map(abs, ratefun.hform_corrections(q)))
        yield _compare('rates.symmetric_form', symmetric, 0.0, 1e-12,
                       normalization=ratefun.ARRAY_NORMALIZATION)
        yield _compare('rates.hform_corrections_vanish', corrections, 0.0, 1e-14)
        yield _compare('rates.rate_1_1_1', ratefun.rate_A(ratefun.RateQuery(1, 1, 1)), 2.5 * math.log(5),
                       1e-12, normalization=ratefun.ARRAY_NORMALIZATION)
        yield _compare('rates.h_half', ratefun.h(0.5), math.log(2), 1e-15)

    def _check_first_moment_convergence(self) -> Iterator[VerificationRecord]:
        ns = (100, 400, 2500, 10_000)
        errors = [abs(ratefun.rate_first_moment_exact_log(n, math.isqrt(n)) - 2.0) for n in ns]
        yield _holds('rates.first_moment_error_decreasing', _strictly_decreasing(errors),
                     errors[0], errors[-1], notes=f"n in {ns}")
        yield _compare('rates.first_moment_n10000', ratefun.rate_first_moment_exact_log(10_000, 100),
                       2.0, 0.1, normalization='n^-1/2 ln E[Z_{n,k}]')

    def _check_array_convergence(self) -> Iterator[VerificationRecord]:
        rows = ratefun.array_convergence([8, 16, 32, 48])
        errors = [row['abs_err'] for row in rows]
        yield _holds('rates.array_error_decreasing', _strictly_decreasing(errors), errors[0], errors[-1],
                     notes="N in (8, 16, 32, 48), logspace")
        yield _compare('rates.array_N48', rows[-1]['estimate'], rows[-1]['rate'], 0.3,
                       normalization=ratefun.ARRAY_NORMALIZATION)

    def _check_second_moment_convergence(self) -> Iterator[VerificationRecord]:
        rows = ratefun.second_moment_convergence([400, 900, 1600, 2500])
        errors = [row['abs_err'] for row in rows]
        last = rows[-1]
        yield _holds('rates.second_moment_error_decreasing', _strictly_decreasing(errors),
                     errors[0], errors[-1], notes="n in (400, 900, 1600, 2500), kappa = lambda = 1")
        yield _compare('rates.second_moment_n2500', last['estimate'], last['rate'], 0.3,
                       normalization=ratefun.MOMENT_NORMALIZATION)
        yield _compare('rates.dominant_j_n2500', last['gamma_hat'], last['gamma_star'], 0.2, relative=True,
                       notes=(f"j* = {last['j_star']}; rescaled by n^1/2; tolerance set by grid resolution, "
                              "integer j puts gamma_hat on a 1/sqrt(n) grid"))

    def _check_varadhan_endpoint(self) -> Iterator[VerificationRecord]:
        for kappa in (0.5, 1.0, 2.0):
            value, gamma_star = ratefun.varadhan_second_moment(kappa, kappa)
            endpoint = 2 * ratefun.first_moment_rate(kappa)
            yield _holds(f"rates.varadhan_above_endpoint.k{kappa:g}", value >= endpoint, value, endpoint,
                         notes=f"gamma* = {gamma_star:.10g}")

    def _check_symmetric_P(self) -> Iterator[VerificationRecord]:
        yield _compare('rates.P_at_8_3', ratefun.solve_P_symmetric(8 / 3), 0.125, 1e-12)
        yield _compare('rates.printed_forms_agree', ratefun.printed_forms_gap(8 / 3), 0.0, 1e-12)
        sweep = [ratefun.solve_P_symmetric(k) for k in np.linspace(0.1, 10.0, 100)]
        yield _holds('rates.P_increasing', _strictly_increasing(sweep), sweep[0], sweep[-1])

    def _check_printed_rates(self) -> Iterator[VerificationRecord]:
        for kappa in (0.5, 1.0, 2.0):
            yield _printed(f"rates.symmetric_printed.k{kappa:g}",
                           ratefun.ld_second_moment_printed(kappa),
                           "printed symmetric value formula vs Varadhan oracle")
            residual, g = ratefun.asymmetric_foc_residual(kappa)
            yield _compare(f"rates.asymmetric_equation_vs_foc.k{kappa:g}", residual, 0.0, 1e-8,
                           notes=f"g = 4 P kappa = {g:.12g}")
        for kappa, lam in ((0.5, 0.5), (1.0, 1.0), (2.0, 2.0), (1.0, 2.0), (1.0, 4.0)):
            yield _printed(f"rates.asymmetric_printed.k{kappa:g}_l{lam:g}",
                           ratefun.ld_mixed_printed(kappa, lam),
                           "asymmetric value formula vs Varadhan oracle, arguments ordered lambda <= kappa")

    def _check_appendix_saddle(self) -> Iterator[VerificationRecord]:
        saddle = ratefun.appendixD_saddle(1.0, 1.0, 10_000)
        yield _compare('rates.saddle_t_star', saddle.t_star, 0.2, 1e-15)
        yield _compare('rates.saddle_s_star', saddle.s_star, 1 / math.sqrt(5), 1e-15)
        yield _compare('rates.ldr1_identity', saddle.ldr1_limit, saddle.rate_xyz, 1e-12,
                       normalization=ratefun.ARRAY_NORMALIZATION)
        yield _compare('rates.scaled_calD', saddle.scaled_calD, 1.0, 0.02, relative=True,
                       notes="N D (4 kappa + gamma) / 2 at N = 10^4")
        yield _compare('rates.scaled_bbD', saddle.scaled_bbD, 1.0, 0.02, relative=True,
                       notes="bbD sqrt(gamma (4 kappa + gamma)) N at N = 10^4")

    def _check_stirling(self) -> Iterator[VerificationRecord]:
        yield _compare('rates.stirling_50_50', ratefun.multinomial_stirling_check([50, 50]), 1.0, 0.01,
                       relative=True)
        coarse = abs(ratefun.multinomial_stirling_check([10, 10, 10]) - 1)
        fine = abs(ratefun.multinomial_stirling_check([100, 100, 100]) - 1)
        yield _holds('rates.stirling_improves', fine < coarse, fine, coarse)

    # solvable

    def _check_expectation_vs_mc(self) -> Iterator[VerificationRecord]:
        for n, k, t in ((5, 2, 1.0), (10, 3, 1.5), (20, 4, 2.0)):
            mean, stderr = solvable.mc_N(n, k, t, samples=100_000, seed=42)
            exact = solvable.expect_N(n, k, t)
            record = _compare(f"solvable.mc_vs_exact.n{n}_k{k}", mean, exact, 3 * stderr,
                              notes=f"t = {t}; 1e5 samples, seed 42; stderr {stderr:.4g}")
            yield record
        yield _exact('solvable.mc_empty_event', solvable.mc_N(5, 2, 0.0, samples=100, seed=1)[0], 0.0)
        yield _exact('solvable.mc_all_subsets', solvable.mc_N(5, 2, 1e9, samples=100, seed=1)[0], 10.0)

    def _check_replica_m1(self) -> Iterator[VerificationRecord]:
        worst = 0.0
        for kappa, t in product((0.5, 1.0, 2.0), (0.5, 1.0, 3.0)):
            sol = solvable.solve_z(1, kappa, t)
            worst = max(worst, abs(sol.ld_value - solvable.first_moment_ld(kappa, t)))
        yield _compare('solvable.replica_m1_vs_first_moment', worst, 0.0, 1e-10,
                       normalization='n^-1/2 ln E[N]', notes=ANSATZ)

    def _check_replica_constraints(self) -> Iterator[VerificationRecord]:
        worst_constraint = worst_sum = 0.0
        for m in (1, 2, 3, 4):
            sol = solvable.solve_z(m, 1.0, 1.0)
            worst_constraint = max(worst_constraint, *map(abs, sol.constraint_residuals()))
            worst_sum = max(worst_sum, abs(solvable.replica_constrained_sum(sol) - sol.ld_value))
        yield _compare('solvable.replica_constraints', worst_constraint, 0.0, 1e-10, notes=ANSATZ)
        yield _compare('solvable.replica_constrained_sum', worst_sum, 0.0, 1e-10, notes=ANSATZ)
        m1 = solvable.solve_z(1, 1.0, 1.0).ld_value
        m2 = solvable.solve_z(2, 1.0, 1.0).ld_value
        yield _holds('solvable.replica_m2_vs_m1', m2 >= 2 * m1, m2, 2 * m1,
                     notes=f"{ANSATZ}; E[N^2] >= E[N]^2")

    def _check_f_m(self) -> Iterator[VerificationRecord]:
        yield _compare('solvable.f_m_forms', solvable.f_m_integral(3, 0.7), solvable.f_m(3, 0.7), 1e-11)
        yield _compare('solvable.f_2_at_1', solvable.f_m(2, 1.0), 2.5, 1e-15)

    def _check_dilog(self) -> Iterator[VerificationRecord]:
        yield _compare('solvable.dilog_1', solvable.dilog(1.0), math.pi ** 2 / 6, 1e-15)
        yield _compare('solvable.dilog_minus_1', solvable.dilog(-1.0), -math.pi ** 2 / 12, 1e-14)
        quad, _ = integrate.quad(lambda u: -math.log1p(-u) / u if u else 1.0, 0.0, -3.0,
                                 epsabs=0.0, epsrel=1e-13)
        yield _compare('solvable.dilog_minus_3_quadrature', solvable.dilog(-3.0), quad, 1e-11)
        worst = 0.0
        for x in (-50.0, -3.0, -0.7, -0.2, 0.3, 0.6, 0.95):
            value = solvable.dilog(x)
            worst = max(worst, abs(value - float(mpmath.polylog(2, x))) / abs(value),
                        abs(value - float(special.spence(1.0 - x))) / abs(value))
        yield _compare('solvable.dilog_vs_libraries', worst, 0.0, 1e-12, normalization='relative error',
                       notes="mpmath.polylog and scipy.special.spence")

    def _check_replica_to_zero(self) -> Iterator[VerificationRecord]:
        ratios = [solvable.replica_ratio(z) for z in np.geomspace(1e-3, 1e6, 200)]
        yield _holds('solvable.replica_ratio_increasing',
                     _strictly_increasing(ratios) and ratios[-1] < solvable.SQRT2, ratios[0], ratios[-1])
        z, value = solvable.replica_to_zero(1.0, 1.0)
        yield _holds('solvable.replica_to_zero_1_1', z > 0 and value > 0 and math.isfinite(value), z, value,
                     notes=ANSATZ)
        try:
            solvable.replica_to_zero(1.5, 1.0)
            raised = False
        except InfeasibleTargetError:
            raised = True
        yield _holds('solvable.replica_to_zero_infeasible', raised, 1.5, solvable.SQRT2,
                     notes="kappa / sqrt(t) >= sqrt(2) is rejected")
        rows = solvable.partition_trend(1.0, 1.0, [100, 400, 900, 1600])
        scaled = [row['scaled'] for row in rows]
        yield _holds('solvable.partition_trend', _strictly_increasing(scaled) and scaled[-1] < value,
                     scaled[-1], value, notes=f"{ANSATZ}; qualitative trend of n^-1/2 ln rho(n, n^1/2)")

    def _check_partitions(self) -> Iterator[VerificationRecord]:
        tables = solvable.partition_counts(200, 15)
        yield _exact('solvable.rho_9_3', tables.rho[9][3], 3)
        yield _exact('solvable.p_6_3', tables.p[6][3], 3)
        below = [(n, k) for k in range(1, 16) for n in range(min(k * (k + 1) // 2, 201)) if tables.rho[n][k]]
        yield _exact('solvable.rho_vanishes_below_triangle', len(below), 0)
        gf = genfun.gf_distinct_partitions(40, 8)
        wrong = [(n, k) for n in range(41) for k in range(9) if gf.coefficient((n, k)) != tables.rho[n][k]]
        yield _exact('solvable.rho_generating_function', len(wrong), 0, notes="n <= 40, k <= 8")

    def _check_poisson(self) -> Iterator[VerificationRecord]:
        for kappa in (1.0, 2.0):
            yield _compare(f"solvable.poisson_max.k{kappa:g}", solvable.poisson_ld_check(kappa), 0.0, 1e-10)
        yield _holds('solvable.poisson_negative_at_2k', solvable.poisson_ld(1.0, 2.0) < 0,
                     solvable.poisson_ld(1.0, 2.0), 0.0)
