import numpy as np
import pytest

from robustmc.metrics import recovery_error
from robustmc.pipeline import default_sparsity, observation_rate_sweep
from robustmc.pipeline import sample_rate
from robustmc.solution import FactorTriple, SolverConfig
from robustmc.solution import initialize, run, step
from robustmc.synthetic import InstanceSpec, generate


def recovery_instance(seed, d=1000, r=10, rho=0.1):
    spec = InstanceSpec(d, d, r, p=sample_rate(d, r, 0.15), rho=rho,
                        seed=seed)
    obs, truth = generate(spec)
    s = int(round(1.2 * rho * spec.p * d * d))
    return obs, truth, s


def test_one_step_on_full_observation():
    obs, truth = generate(InstanceSpec(100, 100, 5, p=1., seed=0))
    random_state = np.random.RandomState(1337)
    y0 = np.linalg.qr(random_state.normal(size=(100, 5)))[0]
    x0 = np.linalg.qr(random_state.normal(size=(100, 5)))[0]
    assert np.min(np.linalg.svd(np.dot(truth.v_star.T, y0),
                                compute_uv=False)) > 1e-6

    cfg = SolverConfig(s=0, r0=5, seed=0)
    state = initialize(obs, cfg, factors=FactorTriple(x0, np.ones(5), y0))
    state = step(state, obs, cfg)
    assert state.tau <= 1e-9 * obs.frobenius_norm()


@pytest.mark.slow
@pytest.mark.parametrize('seed', [1, 2, 3])
def test_exact_recovery(seed):
    obs, truth, s = recovery_instance(seed)
    cfg = SolverConfig(s=s, r0=15, kappa=1e4, tol=1e-7, seed=seed)
    result = run(obs, cfg)
    assert result.converged
    assert result.factors.rank == 10
    report = recovery_error(result.factors, truth)
    assert report.max_angle <= 1e-5
    assert report.rel_frobenius <= 1e-6


@pytest.mark.slow
def test_rank_adaptation():
    obs, _, s = recovery_instance(1)
    result = run(obs, SolverConfig(s=s, r0=25, seed=1))
    ranks = [rank for _, rank in result.state.rank_history]
    assert ranks[0] == 25
    assert ranks[-1] == 10
    assert all(a > b for a, b in zip(ranks[:-1], ranks[1:]))
    assert len(result.state.rank_history) >= 2
    trace_ranks = [record.rank for record in result.state.trace]
    assert all(a >= b for a, b in zip(trace_ranks[:-1], trace_ranks[1:]))
    assert result.factors.rank == 10


@pytest.mark.slow
def test_observation_rate_sweep_iterations():
    records = list(observation_rate_sweep(2000, 10, 0.1, [0.05, 0.1, 0.5],
                                          r0=10, random_state=1337))
    assert all(record.outcome == 'Converged' for record in records)
    iterations = [record.n_iterations for record in records]
    assert all(a >= b for a, b in zip(iterations[:-1], iterations[1:]))


@pytest.mark.slow
@pytest.mark.parametrize('seed', list(range(10)))
def test_residual_decreases_after_the_last_rank_change(seed):
    spec = InstanceSpec(500, 500, 5, p=0.3, rho=0.05, seed=seed)
    obs, _ = generate(spec)
    cfg = SolverConfig(s=default_sparsity(0.05, obs.n_entries), r0=8,
                       seed=seed)
    result = run(obs, cfg)
    state = result.state
    last_change = state.rank_history[-1][0]
    taus = [record.tau for record in state.trace
            if record.iter >= last_change]
    for before, after in zip(taus[:-1], taus[1:]):
        assert after <= before * (1. + 1e-12)
