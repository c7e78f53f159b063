#!/usr/bin/env python
# -*- coding: utf-8 -*-
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from sklearn.utils import check_random_state

from ..metrics import recovery_error
from ..solution import SolverConfig, run
from ..synthetic import InstanceSpec, generate


logger = logging.getLogger(__name__)


def default_sparsity(rho, n_obs, factor=1.2):
    '''Sparsity budget ``round(factor * rho * n_obs)``.

    A budget slightly above the expected number of observed corruptions
    ``rho * n_obs``.
    '''
    if rho < 0 or n_obs < 0 or factor <= 0:
        raise ValueError("'rho', 'n_obs' have to be >= 0 and 'factor' > 0")
    return int(round(factor * rho * n_obs))


@dataclass
class SweepRecord:
    spec: InstanceSpec
    s: int
    outcome: str
    n_iterations: int
    final_rank: int
    tau: float
    rel_frobenius: float
    max_angle: float
    wall_s: float


def __solve_instance__(idx, spec, r0, s_factor, solver_kw):
    obs, truth = generate(spec)
    s = default_sparsity(spec.rho, obs.n_entries, factor=s_factor)
    cfg = SolverConfig(s=s, r0=r0, seed=spec.seed, **solver_kw)
    start = time.perf_counter()
    result = run(obs, cfg)
    wall_s = time.perf_counter() - start
    report = recovery_error(result.factors, truth)
    return idx, SweepRecord(spec=spec,
                            s=s,
                            outcome=result.outcome.value,
                            n_iterations=result.n_iterations,
                            final_rank=result.factors.rank,
                            tau=result.state.tau,
                            rel_frobenius=report.rel_frobenius,
                            max_angle=report.max_angle,
                            wall_s=wall_s)


def _run_specs(specs, r0, s_factor, solver_kw, n_jobs):
    tasks = [(i, spec, r0, s_factor, solver_kw)
             for i, spec in enumerate(specs)]
    if n_jobs == 1:
        for task in tasks:
            yield __solve_instance__(*task)[1]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as executor:
            futures = [executor.submit(__solve_instance__, *task)
                       for task in tasks]
            for future in futures:
                yield future.result()[1]


def _draw_seeds(n, random_state):
    random_state = check_random_state(random_state)
    return [int(seed) for seed in random_state.randint(0, 2**31 - 1, size=n)]


def observation_rate_sweep(d,
                           r,
                           rho,
                           ps,
                           n_repeats=1,
                           r0=None,
                           s_factor=1.2,
                           n_jobs=1,
                           random_state=None,
                           **solver_kw):
    '''Solves square instances of size ``d`` for several observation rates.

    Parameters
    ----------
    d : int
        Rows and columns of the instances.

    r : int
        Rank of L*.

    rho : float
        Corruption rate.

    ps : iterable of floats
        Observation rates.

    n_repeats : int, optional
        Instances per observation rate.

    r0 : None or int, optional
        Initial rank; if None ``r`` is used.

    s_factor : float, optional
        Sparsity budget ``s = round(s_factor * rho * |Omega|)``.

    n_jobs : int, optional
        Number of processes; instances are solved independently.

    random_state: None, int or RandomState
        If int, random_state is the seed used by the random number generator;
        If RandomState instance, random_state is the random number generator;
        If None, the random number generator is the RandomState instance used
        by np.random.

    **solver_kw
        Further ``SolverConfig`` fields.

    Yields
    ------
    record : SweepRecord
        One per instance, ordered by ``ps`` and repetition.
    '''
    ps = list(ps)
    if n_repeats < 1:
        raise ValueError("'n_repeats' has to be >= 1")
    seeds = iter(_draw_seeds(len(ps) * n_repeats, random_state))
    specs = [InstanceSpec(d_rows=d, d_cols=d, r=r, p=p, rho=rho,
                          seed=next(seeds))
             for p in ps
             for _ in range(n_repeats)]
    logging.debug('Running observation_rate_sweep with d={} and '
                  '{} instances'.format(d, len(specs)))
    return _run_specs(specs, r if r0 is None else r0, s_factor, solver_kw,
                      n_jobs)


def sample_rate(d, r, c):
    '''Observation rate ``min(1, c r^2 log(d) / d)``.'''
    return min(1., c * r ** 2 * np.log(d) / d)


def matrix_size_sweep(ds,
                      r,
                      rho,
                      c=0.15,
                      n_repeats=1,
                      r0=None,
                      s_factor=1.2,
                      n_jobs=1,
                      random_state=None,
                      **solver_kw):
    '''Solves square instances of growing size with
    ``p = min(1, c r^2 log(d) / d)``.

    Parameters are those of ``observation_rate_sweep`` with the sizes
    ``ds`` instead of the rates and the constant ``c`` of the rate.

    Yields
    ------
    record : SweepRecord
        One per instance, ordered by ``ds`` and repetition.
    '''
    ds = list(ds)
    if n_repeats < 1:
        raise ValueError("'n_repeats' has to be >= 1")
    seeds = iter(_draw_seeds(len(ds) * n_repeats, random_state))
    specs = [InstanceSpec(d_rows=d, d_cols=d, r=r, p=sample_rate(d, r, c),
                          rho=rho, seed=next(seeds))
             for d in ds
             for _ in range(n_repeats)]
    logging.debug('Running matrix_size_sweep with {} instances'.format(
        len(specs)))
    return _run_specs(specs, r if r0 is None else r0, s_factor, solver_kw,
                      n_jobs)
