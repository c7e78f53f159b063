"""Alternating least squares on the nonlinear equations
``x_i^T y_j = M_ij`` for ``(i, j)`` in ``Omega \\ supp(S)``.

One iteration solves all rows of X with Y fixed, re-orthonormalizes the
result by QR and an SVD of the triangular factor (dropping directions whose
singular values fall below ``sigma_1 / kappa``), does the same for Y and
finally re-estimates the sparse outliers from the residual.
"""
import logging
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np
from sklearn.utils import check_random_state

from ..exceptions import ModelCollapsedError, ThinRowWarning
from ..linalg import qr_thin, svd_small, truncated_svd
from ..linalg._dense import _lsq_solve
from ..observation import MaskedView, ObservedMatrix, Residual
from ..observation import project_residual
from ..outlier import SparseCorrection
from ._config import FactorTriple, Outcome, SolverResult, SolverState
from ._config import TraceRecord


logger = logging.getLogger(__name__)

ROWS_PER_TASK = 256


def _elapsed_ms(start):
    return (time.perf_counter() - start) * 1e3


def _draw_subsets(counts, per_row, random_state):
    subsets = {}
    if per_row <= 0:
        return subsets
    random_state = check_random_state(random_state)
    for g in np.flatnonzero(counts > per_row):
        picked = random_state.choice(counts[g], size=per_row, replace=False)
        subsets[g] = np.sort(picked)
    return subsets


def solve_rows(view,
               factor,
               which='x',
               min_row_obs_factor=2.,
               subsample_per_row=0,
               random_state=None,
               threads=1):
    """Row-wise least-squares solves with the other factor fixed.

    For ``which='x'`` row ``i`` of the result minimizes
    ``sum_j (x . factor_j - M_ij)^2`` over the effective entries
    ``(i, j)`` of ``view``. For ``which='y'`` the roles of rows and columns
    are swapped and ``factor`` is the (m, r) left factor.

    Parameters
    ----------
    view : MaskedView or ObservedMatrix
        Entries that enter the equations.

    factor : numpy.array, shape=(n, r) or (m, r)
        The fixed factor.

    which : {'x', 'y'}
        Which side to solve for.

    min_row_obs_factor : float, optional
        Rows with fewer than ``min_row_obs_factor * r`` equations are
        reported with a ``ThinRowWarning``; their solutions are the
        minimum-norm least-squares solutions and rows without any equation
        are zero.

    subsample_per_row : int, optional
        If > 0, rows with more equations are solved on a random subset of
        this size.

    random_state : None, int or numpy.random.RandomState
        Used to draw the subsets. All subsets are drawn before the solves
        are dispatched.

    threads : int, optional
        Number of threads. Each row is assembled and solved the same way
        regardless of the scheduling, so the result does not depend on it.

    Returns
    -------
    solution : numpy.array, shape=(m, r) or (n, r)
    """
    if isinstance(view, ObservedMatrix):
        view = MaskedView(view)
    if which == 'x':
        axis = 'rows'
        n_groups, n_other = view.shape
    elif which == 'y':
        axis = 'cols'
        n_other, n_groups = view.shape
    else:
        raise ValueError("'which' has to be 'x' or 'y', not {!r}".format(
            which))
    factor = np.ascontiguousarray(factor, dtype=np.float64)
    if factor.ndim != 2 or factor.shape[0] != n_other:
        raise ValueError(
            "'factor' has to be of shape ({}, r), got {}".format(
                n_other, factor.shape))
    rank = factor.shape[1]

    ptr, other, values = view.grouped(axis)
    counts = np.diff(ptr)
    required = min_row_obs_factor * rank
    thin = np.flatnonzero(counts < required)
    if len(thin) > 0:
        warnings.warn(ThinRowWarning(axis, thin, counts[thin], required),
                      stacklevel=2)
    subsets = _draw_subsets(counts, subsample_per_row, random_state)

    solution = np.zeros((n_groups, rank))

    def solve_block(start):
        for g in range(start, min(start + ROWS_PER_TASK, n_groups)):
            if counts[g] == 0:
                continue
            ids = np.arange(ptr[g], ptr[g + 1])
            if g in subsets:
                ids = ids[subsets[g]]
            solution[g] = _lsq_solve(factor[other[ids]], values[ids])

    starts = range(0, n_groups, ROWS_PER_TASK)
    if threads == 1:
        for start in starts:
            solve_block(start)
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            # list() re-raises exceptions of the workers
            list(executor.map(solve_block, starts))
    return solution


def reorthonormalize_and_truncate(xt, kappa=None):
    """QR of ``xt`` followed by an SVD of the triangular factor.

    Parameters
    ----------
    xt : numpy.array, shape=(m, r)
        Nonzero factor from ``solve_rows``.

    kappa : None or float
        Every direction with ``kappa * sigma_j < sigma_1`` is discarded.
        ``None`` keeps all directions.

    Returns
    -------
    basis : numpy.array, shape=(m, r_new)
        ``q u[:, :r_new]`` with ``xt = q r`` and ``r = u diag(sigma) v^T``.

    svd : SvdResult
        Full SVD of ``r``.

    r_new : int
        Retained rank.
    """
    qr = qr_thin(xt)
    core = svd_small(qr.r)
    if not core.sigma[0] > 0.:
        raise ModelCollapsedError(
            'All singular values of the {} factor vanished'.format(
                xt.shape))
    if kappa is None:
        r_new = len(core.sigma)
    else:
        r_new = int(np.sum(kappa * core.sigma >= core.sigma[0]))
    basis = np.dot(qr.q, core.u[:, :r_new])
    return basis, core, r_new


def localized_directions(factors, fraction=0.02, mass=0.9):
    """Directions whose singular vectors concentrate on few coordinates.

    Direction ``j`` is localized if the ``ceil(fraction * m)`` largest
    squared entries of ``x[:, j]`` or the ``ceil(fraction * n)`` largest
    squared entries of ``y[:, j]`` carry at least ``mass`` of the column's
    squared norm. The leading direction is never reported.

    Returns
    -------
    mask : numpy.array of bool, shape=(rank,)
    """
    mask = np.zeros(factors.rank, dtype=bool)
    for side in (factors.x, factors.y):
        dim = side.shape[0]
        k = min(dim, max(1, int(np.ceil(fraction * dim))))
        squared = side ** 2
        top = -np.partition(-squared, k - 1, axis=0)[:k]
        total = np.sum(squared, axis=0)
        with np.errstate(invalid='ignore', divide='ignore'):
            share = np.sum(top, axis=0) / total
        mask |= share >= mass
    mask[:1] = False
    return mask


def excess_directions(factors, cfg):
    """Directions a rank check with ``cfg`` would remove: those with
    ``kappa * sigma_j < sigma_1`` and, unless ``cfg.localization_mass`` is
    None, the localized ones.
    """
    sigma = factors.sigma
    mask = cfg.kappa * sigma < sigma[0]
    if cfg.localization_mass is not None:
        mask |= localized_directions(factors,
                                     cfg.localization_fraction,
                                     cfg.localization_mass)
    return mask


def _raw_residual(obs):
    ids = np.arange(obs.n_entries)
    return Residual(ids, obs.rows, obs.cols, obs.values.copy(),
                    obs.frobenius_norm(), obs.shape)


def _tau(residual, correction):
    # entry-ids of a full residual equal positions
    active = np.ones(len(residual.values), dtype=bool)
    active[correction.entry_ids] = False
    kept = residual.values[active]
    return float(np.sqrt(np.dot(kept, kept)))


def _n_new(correction, previous):
    return int(len(np.setdiff1d(correction.entry_ids, previous.entry_ids,
                                assume_unique=True)))


def _hold_support(residual, previous):
    ids = previous.entry_ids
    return SparseCorrection(residual.rows[ids],
                            residual.cols[ids],
                            residual.values[ids],
                            entry_ids=ids,
                            strategy=previous.strategy)


def _check_factors(factors, obs):
    m, n = obs.shape
    x = np.asarray(factors.x, dtype=np.float64)
    y = np.asarray(factors.y, dtype=np.float64)
    sigma = np.asarray(factors.sigma, dtype=np.float64)
    rank = len(sigma)
    if x.shape != (m, rank) or y.shape != (n, rank):
        raise ValueError(
            'Factors of shape {} / {} / {} do not fit a {}x{} '
            'matrix'.format(x.shape, sigma.shape, y.shape, m, n))
    if rank < 1 or rank > min(m, n):
        raise ValueError("Rank of 'factors' has to be in [1, {}]".format(
            min(m, n)))
    return FactorTriple(np.ascontiguousarray(x), sigma,
                        np.ascontiguousarray(y))


def initialize(obs, cfg, factors=None):
    """Initial outlier estimate, factors and residual.

    ``S_0`` thresholds the raw observations, the factors are the rank
    ``r0`` truncated SVD of ``Pi_Omega(M - S_0) / p'`` with
    ``p' = (|Omega| - s) / (m n)``. The residual of these factors gives
    ``S_1`` and ``tau_1``.

    Parameters
    ----------
    obs : ObservedMatrix
        Observed entries of M.

    cfg : SolverConfig
        Solver parameters.

    factors : None or FactorTriple, optional
        Start from these factors instead of the truncated SVD.

    Returns
    -------
    state : SolverState
        State with ``iter=1``.
    """
    start = time.perf_counter()
    m, n = obs.shape
    budget = cfg.budget
    if obs.n_entries <= budget:
        raise ValueError(
            'The sparsity budget s={} consumes all {} observations'.format(
                budget, obs.n_entries))
    policy = cfg.policy()
    random_state = check_random_state(cfg.seed)

    s0 = policy.select(_raw_residual(obs))
    if factors is None:
        if cfg.r0 > min(m, n):
            raise ValueError("'r0'={} exceeds min(m, n)={}".format(
                cfg.r0, min(m, n)))
        p_prime = (obs.n_entries - budget) / float(m * n)
        operator = obs.to_sparse(exclude=s0.entry_ids) / p_prime
        left, sigma, right = truncated_svd(operator,
                                           cfg.r0,
                                           random_state=random_state,
                                           n_iter=cfg.n_init_iter,
                                           oversample=cfg.init_oversample)
        factors = FactorTriple(left, sigma, right)
    else:
        factors = _check_factors(factors, obs)

    residual = project_residual(obs, factors.x, factors.sigma, factors.y)
    correction = policy.select(residual)
    tau = _tau(residual, correction)
    record = TraceRecord(iter=1,
                         tau=tau,
                         rank=factors.rank,
                         dropped=_n_new(correction, s0),
                         wall_ms=_elapsed_ms(start))
    logger.debug('iter=1 tau=%.6e rank=%d dropped=%d',
                 tau, factors.rank, record.dropped)
    return SolverState(iter=1,
                       factors=factors,
                       correction=correction,
                       tau=tau,
                       rank_history=[(1, factors.rank)],
                       trace=[record],
                       random_state=random_state)


def _stagnated(trace, baseline, cfg):
    it = trace[-1].iter
    w = cfg.stagnation_window
    if it - w < baseline:
        return False
    earlier = trace[it - w - 1].tau
    return earlier > 0. and trace[-1].tau / earlier > cfg.stagnation_ratio


def step(state, obs, cfg):
    """One sweep: X-solve, re-orthonormalization, Y-solve,
    re-orthonormalization, residual, outlier estimate and ``tau``.

    The rank check runs every ``cfg.rank_check_period`` iterations, in
    the iteration after a stagnation and when ``state.final_rank_check``
    is set. Besides the ``kappa`` cut it drops localized directions, see
    ``localized_directions``. If a check forced by a stagnation does not
    lower the rank the outliers are reselected and a drop event is
    recorded.

    Returns
    -------
    state : SolverState
        New state; ``state`` itself is not modified.
    """
    start = time.perf_counter()
    it = state.iter + 1
    forced = state.pending_rank_check
    check_rank = forced or state.final_rank_check or \
        it % cfg.rank_check_period == 0
    kappa = cfg.kappa if check_rank else None
    solve_kwargs = dict(min_row_obs_factor=cfg.min_row_obs_factor,
                        subsample_per_row=cfg.subsample_per_row,
                        random_state=state.random_state,
                        threads=cfg.threads)

    view = MaskedView(obs, state.correction.entry_ids)
    x_tilde = solve_rows(view, state.factors.y, 'x', **solve_kwargs)
    x_basis, _, _ = reorthonormalize_and_truncate(x_tilde, kappa)
    y_tilde = solve_rows(view, x_basis, 'y', **solve_kwargs)
    y_basis, core, rank = reorthonormalize_and_truncate(y_tilde, kappa)
    # x_basis y_tilde^T = (x_basis v) diag(sigma) (y_basis)^T
    factors = FactorTriple(np.ascontiguousarray(np.dot(x_basis,
                                                       core.v[:, :rank])),
                           core.sigma[:rank].copy(),
                           np.ascontiguousarray(y_basis))
    localized = False
    if check_rank and cfg.localization_mass is not None:
        mask = localized_directions(factors,
                                    cfg.localization_fraction,
                                    cfg.localization_mass)
        if np.any(mask):
            logger.info('iter=%d dropping %d localized direction(s)',
                        it, int(np.sum(mask)))
            keep = ~mask
            factors = FactorTriple(np.ascontiguousarray(factors.x[:, keep]),
                                   factors.sigma[keep],
                                   np.ascontiguousarray(factors.y[:, keep]))
            rank = factors.rank
            localized = True

    rank_history = list(state.rank_history)
    drop_events = list(state.drop_events)
    baseline = state.stagnation_baseline
    rank_dropped = rank < state.rank
    if rank_dropped:
        logger.info('iter=%d rank dropped from %d to %d',
                    it, state.rank, rank)
        rank_history.append((it, rank))
        baseline = it

    residual = project_residual(obs, factors.x, factors.sigma, factors.y)
    refresh = cfg.outlier_refresh == 'every' or localized
    if forced and not rank_dropped:
        logger.info('iter=%d residual stagnated without rank deficiency, '
                    'reselecting outliers', it)
        drop_events.append(it)
        baseline = it
        refresh = True
    if refresh:
        correction = cfg.policy().select(residual)
    else:
        correction = _hold_support(residual, state.correction)
    tau = _tau(residual, correction)

    record = TraceRecord(iter=it,
                         tau=tau,
                         rank=rank,
                         dropped=_n_new(correction, state.correction),
                         wall_ms=_elapsed_ms(start))
    trace = state.trace + [record]
    logger.debug('iter=%d tau=%.6e rank=%d dropped=%d',
                 it, tau, rank, record.dropped)

    pending = tau > cfg.tol and _stagnated(trace, baseline, cfg)
    if pending:
        logger.info('iter=%d residual stagnated (tau=%.6e)', it, tau)
    return replace(state,
                   iter=it,
                   factors=factors,
                   correction=correction,
                   tau=tau,
                   rank_history=rank_history,
                   drop_events=drop_events,
                   trace=trace,
                   pending_rank_check=pending,
                   stagnation_baseline=baseline,
                   final_rank_check=False)


def relative_residual(state, obs):
    """``tau / ||Pi_{Omega_t}(M)||_F``."""
    active = np.ones(obs.n_entries, dtype=bool)
    active[state.correction.entry_ids] = False
    values = obs.values[active]
    norm = float(np.sqrt(np.dot(values, values)))
    if norm == 0.:
        return 0. if state.tau == 0. else np.inf
    return state.tau / norm


def run(obs, cfg, state=None):
    """Runs the solver until ``tau <= cfg.tol`` or ``cfg.max_iters``.

    A state that meets the tolerance while a rank check would still remove
    directions is not final: one more iteration with a rank check runs
    first.

    Parameters
    ----------
    obs : ObservedMatrix
        Observed entries of M.

    cfg : SolverConfig
        Solver parameters.

    state : None or SolverState, optional
        Continue from this state instead of calling ``initialize``.

    Returns
    -------
    result : SolverResult
        Unpacks as ``state, factors, correction``. Reaching
        ``cfg.max_iters`` is reported as ``Outcome.MAX_ITERS``, not raised.
    """
    if state is None:
        state = initialize(obs, cfg)
    while state.iter < cfg.max_iters:
        if state.tau <= cfg.tol:
            excess = excess_directions(state.factors, cfg)
            if not np.any(excess):
                break
            logger.info('iter=%d tolerance met with %d excess direction(s), '
                        'checking the rank', state.iter, int(np.sum(excess)))
            state = replace(state, final_rank_check=True)
        state = step(state, obs, cfg)

    converged = state.tau <= cfg.tol and \
        not np.any(excess_directions(state.factors, cfg))
    if converged:
        outcome = Outcome.CONVERGED
        logger.info('Converged after %d iterations: tau=%.6e rank=%d',
                    state.iter, state.tau, state.rank)
    else:
        outcome = Outcome.MAX_ITERS
        logger.warning('No convergence within %d iterations: tau=%.6e '
                       'rank=%d', state.iter, state.tau, state.rank)
    return SolverResult(state=state,
                        outcome=outcome,
                        relative_residual=relative_residual(state, obs))
