import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from robustmc.synthetic import InstanceSpec, generate, incoherence
from robustmc.synthetic import example_one, economy_svd, sub_stream


def test_small_fully_observed_instance():
    obs, truth = generate(InstanceSpec(4, 4, 1, p=1., seed=0))
    assert obs.n_entries == 16
    assert len(truth.s_star) == 0
    assert len(truth.s_star_observed) == 0
    assert truth.rank == 1
    assert truth.shape == (4, 4)
    assert truth.sigma_star[0] > 0.
    assert_allclose(np.dot(truth.u_star.T, truth.u_star), 1., atol=1e-12)
    assert_allclose(np.dot(truth.v_star.T, truth.v_star), 1., atol=1e-12)
    assert_allclose(truth.dense_l(),
                    np.dot(truth.u_star * truth.sigma_star,
                           truth.v_star.T), atol=1e-14)
    assert_array_equal(truth.dense_m(), truth.dense_l())
    assert_allclose(obs.to_sparse().toarray(), truth.dense_m(), atol=1e-15)


def test_sampling_concentration():
    d = 200
    spec = InstanceSpec(d, d, 3, p=0.3, rho=0.1, seed=1337)
    obs, truth = generate(spec)
    n_cells = d * d

    def within(count, probability, n_sigma=5.):
        mean = probability * n_cells
        sd = np.sqrt(n_cells * probability * (1. - probability))
        return abs(count - mean) <= n_sigma * sd

    assert within(obs.n_entries, 0.3)
    assert within(len(truth.s_star), 0.1)
    assert within(len(truth.s_star_observed), 0.03)
    half_width = 3. / (2. * d)
    assert np.all(np.abs(truth.s_star.values) <= half_width)
    # the corruptions are spread over the whole interval
    assert np.max(truth.s_star.values) > 0.9 * half_width
    assert np.min(truth.s_star.values) < -0.9 * half_width

    # L* = A B^T with variance 1 / d entries in A and B
    assert_allclose(np.var(truth.l_star), 3. / d ** 2, rtol=0.5)


def test_observed_values_and_corruptions():
    spec = InstanceSpec(30, 20, 2, p=0.5, rho=0.2, seed=3)
    obs, truth = generate(spec)
    dense_m = truth.dense_m()
    assert_allclose(obs.values, dense_m[obs.rows, obs.cols], atol=1e-15)

    observed = truth.s_star_observed
    assert_array_equal(obs.rows[observed.entry_ids], observed.rows)
    assert_array_equal(obs.cols[observed.entry_ids], observed.cols)
    mask = np.zeros((30, 20), dtype=bool)
    mask[obs.rows, obs.cols] = True
    assert observed.support == {(i, j) for i, j in truth.s_star.support
                                if mask[i, j]}


def test_strict_sparsity():
    spec = InstanceSpec(12, 10, 2, p=0.8, rho=0.35, seed=5,
                        strict_sparsity=True)
    _, truth = generate(spec)
    assert_array_equal(np.bincount(truth.s_star.rows, minlength=12), 3)


def test_determinism_and_independent_streams():
    spec = InstanceSpec(25, 30, 2, p=0.4, rho=0.1, seed=42)
    obs, truth = generate(spec)
    obs_again, truth_again = generate(InstanceSpec(25, 30, 2, p=0.4,
                                                   rho=0.1, seed=42))
    assert obs == obs_again
    assert_array_equal(truth.u_star, truth_again.u_star)
    assert_array_equal(truth.s_star.values, truth_again.s_star.values)

    assert obs != generate(InstanceSpec(25, 30, 2, p=0.4, rho=0.1,
                                        seed=43))[0]

    # the corruption level leaves mask and L* untouched
    clean, clean_truth = generate(InstanceSpec(25, 30, 2, p=0.4, rho=0.,
                                               seed=42))
    assert_array_equal(clean.rows, obs.rows)
    assert_array_equal(clean.cols, obs.cols)
    assert_array_equal(clean_truth.u_star, truth.u_star)
    assert len(clean_truth.s_star) == 0
    difference = obs.values - clean.values
    expected = np.zeros(obs.n_entries)
    expected[truth.s_star_observed.entry_ids] = truth.s_star_observed.values
    assert_allclose(difference, expected, atol=1e-15)


def test_instance_spec_validation():
    with pytest.raises(ValueError):
        InstanceSpec(5, 4, 5, p=0.5)
    with pytest.raises(ValueError):
        InstanceSpec(5, 4, 0, p=0.5)
    with pytest.raises(ValueError):
        InstanceSpec(5, 4, 1, p=0.)
    with pytest.raises(ValueError):
        InstanceSpec(5, 4, 1, p=1.5)
    with pytest.raises(ValueError):
        InstanceSpec(5, 4, 1, p=0.5, rho=1.)
    with pytest.raises(ValueError):
        InstanceSpec(5.5, 4, 1, p=0.5)
    with pytest.warns(UserWarning):
        InstanceSpec(10, 10, 2, p=0.4)
    with pytest.raises(ValueError):
        generate({'d_rows': 5})

    spec = InstanceSpec(10, 20, 2, p=0.5)
    assert spec.shape == (10, 20)
    assert spec.d == 20


def test_large_instances_keep_only_observed_corruptions():
    spec = InstanceSpec(10, 10, 1, p=0.6, rho=0.3, seed=9)
    obs, truth = generate(spec, dense_cap=50)
    assert not truth.s_star_complete
    assert truth.l_star is None
    assert truth.s_star.support == truth.s_star_observed.support
    with pytest.raises(ValueError):
        truth.dense_s()
    full_obs, full_truth = generate(spec)
    assert obs == full_obs
    assert_allclose(truth.dense_l(), full_truth.l_star, atol=1e-14)


def test_incoherence():
    assert incoherence(np.eye(4)[:, :1]) == 4.
    assert_allclose(incoherence(np.full((4, 1), 0.5)), 1.)
    assert_allclose(incoherence(np.eye(3)), 1.)
    with pytest.raises(ValueError):
        incoherence(np.ones((4, 1)))
    with pytest.raises(ValueError):
        incoherence(np.ones((2, 3)))

    random_state = np.random.RandomState(1337)
    for _ in range(20):
        m = random_state.randint(2, 30)
        r = random_state.randint(1, m + 1)
        u = np.linalg.qr(random_state.normal(size=(m, r)))[0]
        mu = incoherence(u)
        row_norms = [np.dot(u[i], u[i]) for i in range(m)]
        assert_allclose(mu, m / float(r) * max(row_norms))
        assert 1. - 1e-12 <= mu <= m / float(r) + 1e-12


def test_example_one():
    for n in (4, 8, 16):
        for rho in (0.25, -0.5, 0.9):
            obs, truth = example_one(n, rho)
            assert obs.n_entries == n * n
            s_dense = truth.dense_s()
            assert_allclose(s_dense.sum(axis=1), 0., atol=1e-15)
            assert_allclose(s_dense, s_dense.T)
            assert_allclose(np.linalg.norm(s_dense, 2), abs(rho),
                            rtol=1e-12)
            assert_allclose(truth.dense_l(), 1. / n)
            assert_allclose(obs.to_sparse().toarray(), truth.dense_m(),
                            atol=1e-15)
            assert_array_equal(truth.s_star_observed.entry_ids,
                               truth.s_star.rows * n + truth.s_star.cols)
            assert len(truth.s_star) == 3 * n

    _, truth = example_one(6, 0.)
    assert len(truth.s_star) == 0
    for n, rho in [(5, 0.5), (2, 0.5), (4, 1.), (4, -1.)]:
        with pytest.raises(ValueError):
            example_one(n, rho)


def test_economy_svd_and_sub_streams():
    random_state = np.random.RandomState(1337)
    a = random_state.normal(size=(15, 3))
    b = random_state.normal(size=(12, 3))
    u, sigma, v = economy_svd(a, b)
    assert_allclose(np.dot(u * sigma, v.T), np.dot(a, b.T), atol=1e-12)
    assert_allclose(np.dot(u.T, u), np.eye(3), atol=1e-12)
    assert np.all(np.diff(sigma) <= 0.)

    first = sub_stream(7, 0).random_sample(5)
    assert_array_equal(first, sub_stream(7, 0).random_sample(5))
    assert not np.array_equal(first, sub_stream(7, 1).random_sample(5))


if __name__ == '__main__':
    import logging
    logging.captureWarnings(True)
    logging.basicConfig(
        format='%(processName)-10s %(name)s %(levelname)-8s %(message)s',
        level=logging.INFO)
    test_sampling_concentration()
    test_example_one()
