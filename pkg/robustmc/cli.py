'''Command line interface: ``robustmc synth``, ``robustmc solve`` and
``robustmc eval``.

Exit codes are 0 for success (and a converged solve), 2 for a solve that
reached the iteration limit and 1 for usage, I/O and parse errors.
'''
import argparse
import csv
import logging
import os
import sys
import time
import warnings

import numpy as np
from scipy import sparse

from .linalg._dense import DENSE_CAP as DENSE_SVD_CAP
from .metrics import recovery_error, stable_rank, theorem1_check
from .observation import MaskedView, project_residual
from .outlier import OutlierPolicy
from .pipeline import default_sparsity
from .solution import Outcome, SolverConfig, run
from .solution._config import OUTLIER_REFRESH_MODES
from .storage import RunManifest, entry_ids, format_value, load_instance
from .storage import load_run, save_instance, save_run
from .synthetic import InstanceSpec, generate


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MAX_ITERS = 2
EVAL_FILE = 'eval.txt'


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, '{}: error: {}\n'.format(self.prog, message))


def _positive_float(text):
    value = float(text)
    if not value > 0.:
        raise argparse.ArgumentTypeError(
            'has to be > 0, got {}'.format(text))
    return value


def build_parser():
    parser = ArgumentParser(
        prog='robustmc',
        description='Robust matrix completion by alternating least squares')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='log every iteration')
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    synth = commands.add_parser('synth', help='generate an instance')
    synth.add_argument('--rows', type=int, required=True)
    synth.add_argument('--cols', type=int, default=None,
                       help='defaults to --rows')
    synth.add_argument('--rank', type=int, required=True)
    synth.add_argument('--p', type=float, required=True,
                       help='observation probability')
    synth.add_argument('--rho', type=float, default=0.,
                       help='corruption probability')
    synth.add_argument('--seed', type=int, default=0)
    synth.add_argument('--strict-sparsity', action='store_true',
                       help='exactly floor(rho * cols) corruptions per row')
    synth.add_argument('--out', required=True)

    solve = commands.add_parser('solve', help='run the solver')
    solve.add_argument('--instance', required=True)
    solve.add_argument('--s', type=int, default=None,
                       help='sparsity budget, defaults to '
                            'round(1.2 * rho * |Omega|)')
    solve.add_argument('--r0', type=int, required=True)
    solve.add_argument('--kappa', type=float, default=1e4)
    solve.add_argument('--tol', type=_positive_float, default=1e-7)
    solve.add_argument('--max-iters', type=int, default=500)
    solve.add_argument('--stagnation-window', type=int, default=5)
    solve.add_argument('--stagnation-ratio', type=float, default=0.9)
    solve.add_argument('--rank-check-period', type=int, default=5)
    solve.add_argument('--min-row-obs-factor', type=float, default=2.)
    solve.add_argument('--outlier-strategy', default='global',
                       choices=OutlierPolicy.available_strategies)
    solve.add_argument('--outlier-k', type=int, default=None)
    solve.add_argument('--outlier-refresh', default='every',
                       choices=OUTLIER_REFRESH_MODES)
    solve.add_argument('--subsample-per-row', type=int, default=0)
    solve.add_argument('--threads', type=int, default=1,
                       help='threads of the row-wise solves; the factors do '
                            'not depend on it, trace.csv is only '
                            'byte-identical across runs with --no-timing')
    solve.add_argument('--seed', type=int, default=0)
    solve.add_argument('--no-timing', action='store_true',
                       help='write wall times as 0, which makes repeated '
                            'runs with identical flags byte-identical')
    solve.add_argument('--out', required=True)

    evaluate = commands.add_parser('eval', help='evaluate a run')
    evaluate.add_argument('--run', required=True)
    evaluate.add_argument('--instance', required=True)
    evaluate.add_argument('--csv', default=None,
                          help='also write the report as CSV')
    return parser


def cmd_synth(args, parser):
    try:
        spec = InstanceSpec(d_rows=args.rows,
                            d_cols=args.rows if args.cols is None
                            else args.cols,
                            r=args.rank,
                            p=args.p,
                            rho=args.rho,
                            seed=args.seed,
                            strict_sparsity=args.strict_sparsity)
    except ValueError as e:
        parser.error(str(e))
    obs, truth = generate(spec)
    save_instance(args.out, obs, truth)
    logger.info('Wrote a %dx%d instance with %d observations to %s',
                obs.m, obs.n, obs.n_entries, args.out)
    return EXIT_OK


def cmd_solve(args, parser):
    obs, _, manifest = load_instance(args.instance)
    s = args.s
    if s is None:
        rho = manifest.get('rho') or 0.
        s = default_sparsity(rho, obs.n_entries)
    try:
        cfg = SolverConfig(s=s,
                           r0=args.r0,
                           kappa=args.kappa,
                           tol=args.tol,
                           max_iters=args.max_iters,
                           stagnation_window=args.stagnation_window,
                           stagnation_ratio=args.stagnation_ratio,
                           rank_check_period=args.rank_check_period,
                           min_row_obs_factor=args.min_row_obs_factor,
                           seed=args.seed,
                           outlier_strategy=args.outlier_strategy,
                           outlier_k=args.outlier_k,
                           outlier_refresh=args.outlier_refresh,
                           subsample_per_row=args.subsample_per_row,
                           threads=args.threads)
    except ValueError as e:
        parser.error(str(e))
    start = time.perf_counter()
    result = run(obs, cfg)
    wall_ms = (time.perf_counter() - start) * 1e3
    run_manifest = RunManifest(
        instance=os.path.abspath(args.instance),
        outcome=result.outcome.value,
        tau=result.state.tau,
        rank=result.factors.rank,
        iterations=result.n_iterations,
        relative_residual=result.relative_residual,
        wall_ms=wall_ms,
        n_drop_events=len(result.state.drop_events),
        config=cfg.to_dict())
    save_run(args.out, result, run_manifest, timing=not args.no_timing)
    logger.info('%s after %d iterations: tau=%.3e rank=%d',
                result.outcome.value, result.n_iterations,
                result.state.tau, result.factors.rank)
    if result.outcome is Outcome.MAX_ITERS:
        return EXIT_MAX_ITERS
    return EXIT_OK


def _residual_report(obs, factors, correction):
    ids = entry_ids(obs, correction.rows, correction.cols)
    residual = project_residual(MaskedView(obs, ids),
                                factors.x, factors.sigma, factors.y)
    kept = obs.values[residual.entry_ids]
    norm = float(np.sqrt(np.dot(kept, kept)))
    return [('tau', residual.norm),
            ('relative_residual',
             residual.norm / norm if norm > 0. else 0.),
            ('rank', factors.rank),
            ('n_outliers', len(correction))]


def _outlier_stable_rank(obs, correction, truth):
    star = truth.s_star_observed
    # duplicate coordinates are summed
    difference = sparse.csr_matrix(
        (np.concatenate([correction.values, -star.values]),
         (np.concatenate([correction.rows, star.rows]),
          np.concatenate([correction.cols, star.cols]))),
        shape=obs.shape)
    try:
        return stable_rank(difference.tocsr(), random_state=0)
    except ValueError:
        return float('nan')


def evaluate(obs, truth, factors, correction):
    '''Report items of a run as ``(key, value)`` pairs.'''
    items = _residual_report(obs, factors, correction)
    if truth is None:
        warnings.warn('No ground truth found; reporting residuals only')
        return items + [('ground_truth', False)]
    report = recovery_error(factors, truth)
    items += [('ground_truth', True),
              ('rel_frobenius', report.rel_frobenius),
              ('max_norm', report.max_norm),
              ('angle_x', report.angle_x.norm),
              ('angle_y', report.angle_y.norm),
              ('rank_mismatch', report.rank_mismatch),
              ('stable_rank', _outlier_stable_rank(obs, correction, truth))]
    if min(obs.shape) <= DENSE_SVD_CAP and truth.s_star_complete:
        check = theorem1_check(truth)
        items += [('theorem1.{}'.format(key), getattr(check, key))
                  for key in ('cond_a_lhs', 'cond_a_rhs', 'cond_b_lhs',
                              'cond_b_rhs', 'eta', 'holds', 'theta_u',
                              'theta_v', 'bound_holds', 'best_rank_error')]
    return items


def cmd_eval(args, parser):
    obs, truth, _ = load_instance(args.instance)
    factors, correction, _, _ = load_run(args.run)
    items = evaluate(obs, truth, factors, correction)
    lines = ['{} = {}'.format(key, format_value(value))
             for key, value in items]
    with open(os.path.join(args.run, EVAL_FILE), 'w') as f:
        f.write('\n'.join(lines) + '\n')
    print('\n'.join(lines))
    if args.csv is not None:
        with open(args.csv, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow([key for key, _ in items])
            writer.writerow([format_value(value) for _, value in items])
    return EXIT_OK


COMMANDS = {'synth': cmd_synth,
            'solve': cmd_solve,
            'eval': cmd_eval}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.captureWarnings(True)
    logging.basicConfig(
        format='%(processName)-10s %(name)s %(levelname)-8s %(message)s',
        level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        return COMMANDS[args.command](args, parser)
    except (ValueError, OSError) as e:
        sys.stderr.write('robustmc: error: {}\n'.format(e))
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
