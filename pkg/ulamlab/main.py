#!/usr/bin/env python3
"""
ulamlab CLI - Exact moments, generating functions, rate functions and the
solvable model for increasing subsequences of random permutations
"""

import argparse
import sys
from fractions import Fraction
from typing import List, Optional

from .core import elliptic3, genfun, perm_oracle, ratefun, solvable, ulam_exact
from .core.errors import DomainError, UlamlabError
from .core.verification import SUITES, VerificationRunner
from .utils.config import Config, DEFAULTS, set_config
from .utils.logger import setup_logger
from .utils.output import emit_table, format_value

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_ERROR = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='ulamlab',
        description="ulamlab - moments of the generalized Ulam problem",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Exact second moment E[Z_{3,2}^2]
  ulamlab moments --n 3 --k 2 --order 2

  # Brute-force check over all permutations of size 6
  ulamlab oracle --n 6 --k 2 --l 3

  # Rate of A(kN, lN, gN) and the second-moment optimizer
  ulamlab rate --kappa 1 --lambda 1 --gamma 1 --form xyz
  ulamlab rate --kappa 1 --lambda 2

  # Generating-function coefficients and the elliptic closed form
  ulamlab series --max-degree 6 --out coeffs.csv
  ulamlab elliptic --x 0.1 0.1 0.1

  # Solvable model
  ulamlab solvable --m 2 --kappa 1 --t 1
  ulamlab mc --n 20 --k 4 --t 2.0 --samples 100000 --seed 42

  # Full verification report
  ulamlab verify --suite all --out report.json
        """)
    parser.add_argument('--log-level', default=None,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='Logging level (stderr)')
    parser.add_argument('--verbose', '-v', action='store_true', help='Shortcut for --log-level DEBUG')

    table = argparse.ArgumentParser(add_help=False)
    table.add_argument('--out', '-o', help='Write the table to this file instead of stdout')
    table.add_argument('--format', dest='fmt', choices=['csv', 'json'], default='csv', help='Table format')

    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    # Exact moments
    mom = subparsers.add_parser('moments', parents=[table], help='Exact moments of Z_{n,k}')
    mom.add_argument('--n', type=int, required=True, help='Permutation size')
    mom.add_argument('--k', type=int, required=True, help='Subsequence length')
    mom.add_argument('--l', type=int, help='Second subsequence length (default: k)')
    mom.add_argument('--order', type=int, choices=[1, 2, 3], default=1,
                     help='1: mean, 2: E[Z_k Z_l], 3: all-or-nothing lower bound for E[Z_k^3]')
    mom.add_argument('--mode', choices=list(ulam_exact.MODES), default=ulam_exact.EXACT, help='Arithmetic')
    mom.add_argument('--per-j', action='store_true', help='Print the j-decomposition as a table')

    # Brute-force oracle
    orc = subparsers.add_parser('oracle', help='Moments by enumeration of all permutations')
    orc.add_argument('--n', type=int, required=True, help='Permutation size')
    orc.add_argument('--k', type=int, required=True, help='Subsequence length')
    orc.add_argument('--l', type=int, help='Second subsequence length')
    orc.add_argument('--order', type=int, choices=[1, 2, 3], help='Moment order (default: 1, or 2 with --l)')

    # Rate functions
    rate = subparsers.add_parser('rate', parents=[table], help='Large-deviation rate functions')
    rate.add_argument('--kappa', type=float, required=True, help='k / N (or k / n^1/2)')
    rate.add_argument('--lambda', dest='lam', type=float, required=True, help='l / N (or l / n^1/2)')
    rate.add_argument('--gamma', type=float, help='j / N; when given, print the rate of A')
    rate.add_argument('--form', choices=list(ratefun.FORMS), default='xyz', help='Formula for the rate of A')

    # Slices of A
    sl = subparsers.add_parser('slice', parents=[table], help='Table of A(a, b, j) at fixed j')
    sl.add_argument('--j', type=int, required=True, help='Number of shared positions')
    sl.add_argument('--max-k', type=int, required=True, help='Largest a')
    sl.add_argument('--max-l', type=int, required=True, help='Largest b')
    sl.add_argument('--mode', choices=list(ulam_exact.MODES), default=ulam_exact.EXACT, help='Arithmetic')

    # Series
    ser = subparsers.add_parser('series', parents=[table], help='Generating-function coefficients')
    ser.add_argument('--max-degree', type=int, required=True, help='Total-degree truncation D')
    ser.add_argument('--r', type=int, choices=[1, 2, 3], default=2, help='Number of lengths (2 gives A)')

    # Elliptic closed form
    ell = subparsers.add_parser('elliptic', parents=[table], help='Elliptic closed form of M3')
    ell.add_argument('--x', type=float, nargs=3, required=True, metavar=('X1', 'X2', 'X3'),
                     help='Evaluates M3 at (x1^2, x2^2, x3^2)')
    ell.add_argument('--degree', type=int, default=40, help='Degree of the series cross-check')

    # Solvable model
    sol = subparsers.add_parser('solvable', parents=[table], help='Replica-symmetric solvable model')
    sol.add_argument('--m', type=int, default=1, help='Moment order (replica count)')
    sol.add_argument('--kappa', type=float, required=True, help='k / n^1/2')
    sol.add_argument('--t', type=float, required=True, help='Threshold on the sum')
    sol.add_argument('--replica-zero', action='store_true', help='Replica-to-zero prediction instead')

    mc = subparsers.add_parser('mc', parents=[table], help='Monte Carlo for small sums of exponentials')
    mc.add_argument('--n', type=int, required=True, help='Number of variables')
    mc.add_argument('--k', type=int, required=True, help='Subset size')
    mc.add_argument('--t', type=float, required=True, help='Threshold on the sum')
    mc.add_argument('--samples', type=int, default=100_000, help='Number of samples')
    mc.add_argument('--seed', type=int, default=42, help='Master seed')

    # Convergence tables
    conv = subparsers.add_parser('converge', parents=[table], help='Exact-vs-limit convergence tables')
    conv.add_argument('--kind', choices=['first', 'array', 'second', 'partition'], required=True,
                      help='first moment, A(kN, lN, gN), second moment, or partition counts')
    conv.add_argument('--sizes', type=int, nargs='+', required=True, help='n (or N) values')
    conv.add_argument('--kappa', type=float, default=1.0, help='kappa')
    conv.add_argument('--lambda', dest='lam', type=float, default=1.0, help='lambda')
    conv.add_argument('--gamma', type=float, default=1.0, help='gamma (array kind)')
    conv.add_argument('--t', type=float, default=1.0, help='t (partition kind)')

    # Verification
    ver = subparsers.add_parser('verify', help='Run cross-validation suites and write a JSON report')
    ver.add_argument('--suite', choices=['all', *SUITES], default='all', help='Suite to run')
    ver.add_argument('--out', '--json', dest='out', default='ulamlab_report.json', help='Report path')

    # Config
    cfg = subparsers.add_parser('config', help='Show or change settings')
    cfg.add_argument('--show', action='store_true', help='Show current configuration')
    cfg.add_argument('--set', dest='assignments', action='append', default=[], metavar='KEY=VALUE',
                     help='Persist a setting (repeatable)')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_OK

    # Initialize configuration and logger
    config = Config()
    set_config(config)
    level = 'DEBUG' if args.verbose else (args.log_level or config.get('log_level'))
    logger = setup_logger(level=level)

    handlers = {
        'moments': handle_moments,
        'oracle': handle_oracle,
        'rate': handle_rate,
        'slice': handle_slice,
        'series': handle_series,
        'elliptic': handle_elliptic,
        'solvable': handle_solvable,
        'mc': handle_mc,
        'converge': handle_converge,
        'verify': handle_verify,
        'config': handle_config,
    }
    try:
        return handlers[args.command](args, config, logger)
    except UlamlabError as e:
        logger.debug(f"{type(e).__name__} in {args.command}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO


def handle_moments(args, config, logger) -> int:
    """Handle exact moment computation"""
    l = args.l if args.l is not None else args.k
    if args.order == 1:
        if args.per_j:
            raise DomainError("--per-j needs --order 2")
        if args.mode == ulam_exact.LOGSPACE:
            print(format_value(ulam_exact.mean_Z_log(args.n, args.k)))
        else:
            print(format_value(ulam_exact.mean_Z(args.n, args.k)))
        return EXIT_OK

    if args.order == 3:
        if args.per_j or args.l is not None:
            raise DomainError("--order 3 takes a single --k and no --per-j")
        logger.info("order 3 prints the all-or-nothing lower bound for E[Z^3]")
        if args.mode == ulam_exact.LOGSPACE:
            print(format_value(ulam_exact.all_or_nothing_bound_log(args.n, args.k, 3)))
        else:
            print(format_value(ulam_exact.all_or_nothing_bound(args.n, args.k, 3)))
        return EXIT_OK

    if args.mode == ulam_exact.LOGSPACE:
        result = ulam_exact.second_moment_log(args.n, args.k, l)
        value, terms = result.log_value, result.per_j_log_terms
    else:
        result = ulam_exact.second_moment(args.n, args.k, l)
        value, terms = result.value, result.per_j_terms

    if args.per_j:
        rows = [{'j': j, 'term': term} for j, term in enumerate(terms)]
        emit_table(rows, ['j', 'term'], args.out, args.fmt)
    else:
        print(format_value(value))
    return EXIT_OK


def handle_oracle(args, config, logger) -> int:
    """Handle brute-force enumeration"""
    order = args.order or (2 if args.l is not None else 1)
    ks = [args.k] if args.l is None else [args.k, args.l]
    value = perm_oracle.brute_moments(args.n, ks, order)
    print(format_value(value))
    return EXIT_OK


def handle_rate(args, config, logger) -> int:
    """Handle rate-function evaluation"""
    if args.gamma is not None:
        q = ratefun.RateQuery(args.kappa, args.lam, args.gamma)
        print(format_value(ratefun.rate_A(q, args.form)))
        return EXIT_OK

    columns = ['source', 'value', 'gamma_star', 'P', 'discrepancy', 'normalization']
    value, gamma_star = ratefun.varadhan_second_moment(args.kappa, args.lam)
    rows = [{'source': 'varadhan', 'value': value, 'gamma_star': gamma_star,
             'normalization': ratefun.MOMENT_NORMALIZATION}]
    printed = []
    if args.kappa == args.lam:
        printed.append(('symmetric_printed', ratefun.ld_second_moment_printed(args.kappa, with_oracle=False)))
    printed.append(('asymmetric_printed', ratefun.ld_mixed_printed(args.kappa, args.lam, with_oracle=False)))
    for source, result in printed:
        result.attach_oracle(value, gamma_star)
        rows.append({'source': source, 'value': result.printed_value, 'P': result.P,
                     'discrepancy': result.discrepancy, 'normalization': result.normalization})
    emit_table(rows, columns, args.out, args.fmt)
    return EXIT_OK


def handle_slice(args, config, logger) -> int:
    """Handle A(a, b, j) tables"""
    table = ulam_exact.comb_A_slice(args.max_k, args.max_l, args.j, args.mode)
    if args.mode == ulam_exact.LOGSPACE:
        rows = [{'k': a, 'l': b, 'j': j, 'value_or_log_value': v.logmag} for a, b, j, v in table.to_rows()]
    else:
        rows = [{'k': a, 'l': b, 'j': j, 'value_or_log_value': v} for a, b, j, v in table.to_rows()]
    emit_table(rows, ['k', 'l', 'j', 'value_or_log_value'], args.out, args.fmt)
    return EXIT_OK


def handle_series(args, config, logger) -> int:
    """Handle generating-function coefficient tables"""
    if args.r == 2:
        series = genfun.gf_A_coefficients(args.max_degree)
        names = ['k', 'l', 'j']
    else:
        series = genfun.gf_A_tilde(args.r, args.max_degree)
        names = [f"x{i + 1}" for i in range(args.r)] + ['w']
    rows = []
    for exps, c in series.items():
        c = Fraction(c)
        row = dict(zip(names, exps))
        row.update(numerator=c.numerator, denominator=c.denominator)
        rows.append(row)
    emit_table(rows, names + ['numerator', 'denominator'], args.out, args.fmt)
    return EXIT_OK


def handle_elliptic(args, config, logger) -> int:
    """Handle the elliptic closed form and its series cross-check"""
    x1, x2, x3 = args.x
    value = elliptic3.M3_elliptic(x1, x2, x3)
    series, tail = elliptic3.m3_series(x1 * x1, x2 * x2, x3 * x3, degree=args.degree)
    rows = []
    if abs(x3) >= elliptic3.X3_SPECIALIZATION:
        fact = elliptic3.factorize(x1, x2, x3)
        rows += [
            {'quantity': 'kappa_plus', 'value': fact.kappa_plus},
            {'quantity': 'kappa_minus', 'value': fact.kappa_minus},
            {'quantity': 'modulus', 'value': fact.modulus},
            {'quantity': 'prefactor', 'value': fact.prefactor},
            {'quantity': 'K', 'value': elliptic3.elliptic_K(fact.modulus)},
        ]
        for (sigma, tau), omega in sorted(fact.omegas.items(), reverse=True):
            rows.append({'quantity': f"omega_{'+' if sigma > 0 else '-'}{'+' if tau > 0 else '-'}",
                         'value': omega})
    else:
        logger.info("x3 below the specialization threshold: two-variable closed form")
    rows += [
        {'quantity': 'M3', 'value': value},
        {'quantity': 'series', 'value': series},
        {'quantity': 'series_delta', 'value': abs(value - series)},
        {'quantity': 'series_tail_bound', 'value': tail},
    ]
    emit_table(rows, ['quantity', 'value'], args.out, args.fmt)
    return EXIT_OK


def handle_solvable(args, config, logger) -> int:
    """Handle replica-symmetric evaluations (ansatz values)"""
    if args.replica_zero:
        z, value = solvable.replica_to_zero(args.kappa, args.t)
        rows = [{'kappa': args.kappa, 't': args.t, 'z': z, 'value': value, 'status': 'ansatz'}]
        emit_table(rows, ['kappa', 't', 'z', 'value', 'status'], args.out, args.fmt)
        return EXIT_OK

    sol = solvable.solve_z(args.m, args.kappa, args.t)
    rows = [
        {'m': sol.m, 't': sol.t, 'kappa': sol.kappa, 'z': sol.z, 'ld_value': sol.ld_value,
         'l': l, 'kappa_l': k, 'tau_l': tau, 'status': 'ansatz'}
        for l, (k, tau) in enumerate(zip(sol.kappa_l, sol.tau_l), start=1)
    ]
    emit_table(rows, ['m', 't', 'kappa', 'z', 'ld_value', 'l', 'kappa_l', 'tau_l', 'status'],
               args.out, args.fmt)
    return EXIT_OK


def handle_mc(args, config, logger) -> int:
    """Handle Monte Carlo estimation"""
    mean, stderr = solvable.mc_N(args.n, args.k, args.t, args.samples, args.seed)
    exact = solvable.expect_N(args.n, args.k, args.t)
    rows = [{'n': args.n, 'k': args.k, 't': args.t, 'samples': args.samples, 'seed': args.seed,
             'mean': mean, 'stderr': stderr, 'exact': exact}]
    emit_table(rows, ['n', 'k', 't', 'samples', 'seed', 'mean', 'stderr', 'exact'], args.out, args.fmt)
    return EXIT_OK


def handle_converge(args, config, logger) -> int:
    """Handle plot-ready convergence tables"""
    if args.kind == 'first':
        target = ratefun.first_moment_rate(args.kappa)
        rows = []
        for n in args.sizes:
            k = int(args.kappa * n ** 0.5)
            estimate = ratefun.rate_first_moment_exact_log(n, k)
            rows.append({'n': n, 'estimate': estimate, 'rate': target, 'abs_err': abs(estimate - target)})
        columns = ['n', 'estimate', 'rate', 'abs_err']
    elif args.kind == 'array':
        rows = ratefun.array_convergence(args.sizes, args.kappa, args.lam, args.gamma)
        columns = ['N', 'estimate', 'rate', 'abs_err']
    elif args.kind == 'second':
        rows = ratefun.second_moment_convergence(args.sizes, args.kappa, args.lam)
        columns = ['n', 'estimate', 'rate', 'abs_err', 'j_star', 'gamma_hat', 'gamma_star']
    else:
        rows = solvable.partition_trend(args.kappa, args.t, args.sizes)
        columns = ['n', 'rho', 'scaled', 'replica_value']
    emit_table(rows, columns, args.out, args.fmt)
    return EXIT_OK


def handle_verify(args, config, logger) -> int:
    """Handle the verification report"""
    runner = VerificationRunner(config, logger)
    records = runner.run(args.suite)
    runner.write_report(records, args.out, args.suite)
    counts = runner.summarize(records)
    print(f"pass: {counts['pass']}, discrepancy: {counts['discrepancy']}, fail: {counts['fail']}")
    for record in records:
        if record.status == 'fail':
            print(f"FAIL {record.check_id}: {record.notes}", file=sys.stderr)
    return EXIT_VERIFY_FAILED if runner.exit_code(records) else EXIT_OK


def handle_config(args, config, logger) -> int:
    """Handle configuration commands"""
    for assignment in args.assignments:
        key, sep, value = assignment.partition('=')
        key = key.strip()
        if not sep or not key:
            raise DomainError(f"expected KEY=VALUE, got {assignment!r}")
        if key not in DEFAULTS:
            raise DomainError(f"unknown setting {key!r}; known: {', '.join(sorted(DEFAULTS))}")
        config.set(key, value.strip())
        print(f"✅ {key} set to {config.get(key)}")

    if args.show or not args.assignments:
        print("Current configuration:")
        for key, value in sorted(config.get_all().items()):
            print(f"  {key}: {value}")
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
