import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from robustmc.exceptions import ConvergenceError, UnsupportedAtScaleError
from robustmc.linalg import qr_thin, svd_small, lsq_solve, truncated_svd
from robustmc.linalg import check_orthonormal
from robustmc.linalg import dense_svd, spectral_norm


def gram_schmidt(a):
    a = np.array(a, dtype=float)
    m, k = a.shape
    q = np.zeros((m, k))
    r = np.zeros((k, k))
    for j in range(k):
        v = a[:, j].copy()
        for i in range(j):
            r[i, j] = np.dot(q[:, i], v)
            v -= r[i, j] * q[:, i]
        r[j, j] = np.linalg.norm(v)
        q[:, j] = v / r[j, j]
    return q, r


def jacobi_eigenvalues(s, tol=1e-14, max_rotations=10000):
    s = np.array(s, dtype=float)
    k = s.shape[0]
    for _ in range(max_rotations):
        off = np.abs(np.triu(s, 1))
        p, q = np.unravel_index(np.argmax(off), off.shape)
        if off[p, q] <= tol * np.max(np.abs(np.diag(s))):
            break
        theta = 0.5 * np.arctan2(2 * s[p, q], s[q, q] - s[p, p])
        c, sn = np.cos(theta), np.sin(theta)
        rot = np.eye(k)
        rot[p, p] = c
        rot[q, q] = c
        rot[p, q] = sn
        rot[q, p] = -sn
        s = np.dot(rot.T, np.dot(s, rot))
    return np.sort(np.diag(s))[::-1]


def random_orthogonal(k, random_state):
    return np.linalg.qr(random_state.normal(size=(k, k)))[0]


def test_qr_thin_examples():
    qr = qr_thin(np.eye(3))
    assert_allclose(qr.q, np.eye(3), atol=1e-15)
    assert_allclose(qr.r, np.eye(3), atol=1e-15)

    qr = qr_thin([[3.], [4.]])
    assert_allclose(qr.q, [[0.6], [0.8]], atol=1e-15)
    assert_allclose(qr.r, [[5.]], atol=1e-14)

    with pytest.raises(ValueError):
        qr_thin(np.ones((2, 3)))


def test_qr_thin_properties():
    random_state = np.random.RandomState(1337)
    for _ in range(100):
        k = random_state.randint(1, 10)
        m = random_state.randint(k, 40)
        a = random_state.normal(size=(m, k))
        q, r = qr_thin(a)
        assert q.shape == (m, k)
        assert r.shape == (k, k)
        assert np.max(np.abs(np.dot(q.T, q) - np.eye(k))) <= 1e-12
        assert np.linalg.norm(np.dot(q, r) - a) <= \
            1e-12 * np.linalg.norm(a)
        assert_array_equal(np.tril(r, -1), 0.)
        assert np.all(np.diag(r) >= 0.)


def test_qr_thin_gram_schmidt_oracle():
    random_state = np.random.RandomState(1337)
    a = random_state.normal(size=(6, 3))
    q, r = qr_thin(a)
    q_gs, r_gs = gram_schmidt(a)
    assert_allclose(q, q_gs, atol=1e-10)
    assert_allclose(r, r_gs, atol=1e-10)


def test_qr_thin_rank_deficient():
    v = np.arange(1., 5.)
    q, r = qr_thin(np.column_stack([v, 2 * v]))
    assert abs(r[1, 1]) <= 1e-12 * np.linalg.norm(v)
    assert_allclose(np.dot(q, r), np.column_stack([v, 2 * v]), atol=1e-12)


def test_svd_small_examples():
    u, sigma, v = svd_small(np.diag([2., 1.]))
    assert_allclose(sigma, [2., 1.])
    assert_allclose(u, np.eye(2), atol=1e-15)
    assert_allclose(v, np.eye(2), atol=1e-15)

    u, sigma, v = svd_small([[0., 1.], [1., 0.]])
    assert_allclose(sigma, [1., 1.])

    u, sigma, v = svd_small(np.zeros((3, 3)))
    assert_array_equal(sigma, 0.)
    assert_array_equal(u, np.eye(3))

    with pytest.raises(ValueError):
        svd_small(np.ones((2, 3)))


def test_svd_small_jacobi_eigen_oracle():
    random_state = np.random.RandomState(1337)
    for _ in range(100):
        k = random_state.randint(1, 9)
        a = random_state.normal(size=(k, k))
        u, sigma, v = svd_small(a)
        eigenvalues = jacobi_eigenvalues(np.dot(a.T, a))
        assert np.max(np.abs(sigma ** 2 - eigenvalues)) <= \
            1e-10 * sigma[0] ** 2
        assert np.all(np.diff(sigma) <= 0.)
        assert np.all(sigma >= 0.)
        assert np.linalg.norm(np.dot(u * sigma, v.T) - a) <= \
            1e-12 * np.linalg.norm(a)
        assert np.max(np.abs(np.dot(u.T, u) - np.eye(k))) <= 1e-12
        assert np.max(np.abs(np.dot(v.T, v) - np.eye(k))) <= 1e-12


def test_svd_small_orthogonal_invariance():
    random_state = np.random.RandomState(42)
    a = random_state.normal(size=(5, 5))
    left = random_orthogonal(5, random_state)
    right = random_orthogonal(5, random_state)
    sigma = svd_small(a).sigma
    rotated = svd_small(np.dot(left, np.dot(a, right))).sigma
    assert_allclose(rotated, sigma, rtol=0, atol=1e-12 * sigma[0])


def test_svd_small_rank_deficient():
    random_state = np.random.RandomState(7)
    a = np.outer(random_state.normal(size=4), random_state.normal(size=4))
    u, sigma, v = svd_small(a)
    assert np.all(sigma[1:] <= 1e-12 * sigma[0])
    assert np.max(np.abs(np.dot(u.T, u) - np.eye(4))) <= 1e-12
    assert_allclose(np.dot(u * sigma, v.T), a, atol=1e-12)


def test_svd_small_sweep_limit():
    random_state = np.random.RandomState(3)
    with pytest.raises(ConvergenceError) as excinfo:
        svd_small(random_state.normal(size=(4, 4)), max_sweeps=0)
    assert excinfo.value.n_iterations == 0


def test_lsq_solve_examples():
    assert_allclose(lsq_solve([[1.], [1.]], [2., 4.]), [3.])
    assert_allclose(lsq_solve(np.eye(2), [5., 7.]), [5., 7.])
    with pytest.raises(ValueError):
        lsq_solve(np.eye(2), [1., 2., 3.])


def test_lsq_solve_normal_equations_oracle():
    random_state = np.random.RandomState(1337)
    for _ in range(100):
        k = random_state.randint(1, 6)
        q = random_state.randint(k, 15)
        coeff = random_state.normal(size=(q, k))
        rhs = random_state.normal(size=q)
        x = lsq_solve(coeff, rhs)
        oracle = np.linalg.solve(np.dot(coeff.T, coeff),
                                 np.dot(coeff.T, rhs))
        assert_allclose(x, oracle, rtol=0,
                        atol=1e-10 * max(1., np.max(np.abs(oracle))))
        normal = np.dot(coeff.T, np.dot(coeff, x) - rhs)
        assert np.max(np.abs(normal)) <= \
            1e-10 * np.linalg.norm(coeff) * np.linalg.norm(rhs)


def test_lsq_solve_minimum_norm():
    # both columns are the same: minimum-norm solution splits evenly
    coeff = np.array([[1., 1.], [1., 1.], [1., 1.]])
    x = lsq_solve(coeff, [2., 2., 2.])
    assert_allclose(x, [1., 1.], atol=1e-12)

    # fewer equations than unknowns
    x = lsq_solve([[1., 2., 2.]], [9.])
    assert_allclose(x, [1., 2., 2.], atol=1e-12)

    assert_array_equal(lsq_solve(np.zeros((3, 2)), [1., 2., 3.]), 0.)


def test_truncated_svd_rank_one():
    random_state = np.random.RandomState(1337)
    u = random_state.normal(size=30)
    u /= np.linalg.norm(u)
    v = random_state.normal(size=20)
    v /= np.linalg.norm(v)
    left, sigma, right = truncated_svd(np.outer(u, v), 1, random_state=0)
    assert_allclose(sigma, [1.], atol=1e-12)
    assert np.sqrt(max(0., 1. - np.dot(left[:, 0], u) ** 2)) <= 1e-8
    assert np.sqrt(max(0., 1. - np.dot(right[:, 0], v) ** 2)) <= 1e-8


def test_truncated_svd_diagonal():
    _, sigma, _ = truncated_svd(np.diag([3., 2., 1.]), 2,
                                random_state=0, n_iter=40)
    assert_allclose(sigma, [3., 2.], atol=1e-8)


def test_truncated_svd_low_rank_plus_noise():
    random_state = np.random.RandomState(1337)
    a = np.dot(random_state.normal(size=(50, 5)),
               random_state.normal(size=(5, 40)))
    a += 1e-10 * random_state.normal(size=(50, 40))
    left, sigma, right = truncated_svd(a, 5, random_state=1)
    true_left = np.linalg.svd(a)[0][:, :5]
    overlap = np.linalg.svd(np.dot(true_left.T, left), compute_uv=False)
    assert np.sqrt(max(0., 1. - np.min(overlap) ** 2)) <= 1e-6
    assert np.max(np.abs(np.dot(left.T, left) - np.eye(5))) <= 1e-12
    assert np.max(np.abs(np.dot(right.T, right) - np.eye(5))) <= 1e-12


def test_truncated_svd_deterministic_and_validated():
    random_state = np.random.RandomState(5)
    a = random_state.normal(size=(12, 9))
    first = truncated_svd(a, 3, random_state=11)
    second = truncated_svd(a, 3, random_state=11)
    for x, y in zip(first, second):
        assert_array_equal(x, y)
    with pytest.raises(ValueError):
        truncated_svd(a, 10)
    with pytest.raises(ValueError):
        truncated_svd(a, 0)


def test_dense_svd_and_spectral_norm():
    random_state = np.random.RandomState(1337)
    for shape in [(7, 4), (4, 7)]:
        a = random_state.normal(size=shape)
        u, sigma, v = dense_svd(a)
        assert_allclose(np.dot(u * sigma, v.T), a, atol=1e-12)
        assert_allclose(sigma, np.linalg.svd(a, compute_uv=False),
                        atol=1e-12)
    a = random_state.normal(size=(30, 20))
    expected = np.linalg.svd(a, compute_uv=False)[0]
    assert_allclose(spectral_norm(a), expected, rtol=1e-12)
    # power iteration branch
    assert_allclose(spectral_norm(a, cap=5, random_state=0), expected,
                    rtol=1e-6)
    with pytest.raises(UnsupportedAtScaleError):
        dense_svd(np.ones((10, 10)), cap=5)


if __name__ == '__main__':
    import logging
    logging.captureWarnings(True)
    logging.basicConfig(
        format='%(processName)-10s %(name)s %(levelname)-8s %(message)s',
        level=logging.INFO)
    test_qr_thin_properties()
    test_svd_small_jacobi_eigen_oracle()


def test_truncated_svd_with_oversampling():
    random_state = np.random.RandomState(3)
    u = np.linalg.qr(random_state.normal(size=(80, 80)))[0]
    v = np.linalg.qr(random_state.normal(size=(60, 60)))[0]
    sigma = np.concatenate([[10., 9., 8.], np.linspace(7.9, 0.1, 57)])
    a = np.dot(u[:, :60] * sigma, v.T)
    left, found, right = truncated_svd(a, 3, random_state=0, n_iter=20)
    assert left.shape == (80, 3)
    assert right.shape == (60, 3)
    assert_allclose(found, [10., 9., 8.], rtol=1e-3)
    with pytest.raises(ValueError):
        truncated_svd(a, 3, oversample=-1)


def test_check_orthonormal():
    q = np.linalg.qr(np.random.RandomState(2).normal(size=(6, 3)))[0]
    assert_array_equal(check_orthonormal(q), q)
    with pytest.raises(ValueError):
        check_orthonormal(2. * q)
    with pytest.raises(ValueError):
        check_orthonormal(np.eye(3)[:2])
    with pytest.raises(ValueError):
        check_orthonormal(np.ones(3))
