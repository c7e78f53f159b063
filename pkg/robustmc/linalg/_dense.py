"""Dense kernels for the tall-skinny (m x r) and small square (r x r)
matrices that show up in the alternating solver.

All matrices are float64 numpy arrays in C (row-major) order.
"""
from collections import namedtuple

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import aslinearoperator
from sklearn.utils import check_array, check_random_state

from ..exceptions import ConvergenceError, UnsupportedAtScaleError


QrResult = namedtuple('QrResult', ['q', 'r'])
SvdResult = namedtuple('SvdResult', ['u', 'sigma', 'v'])

DENSE_CAP = 512


def as_matrix(a, name='a'):
    """Validates ``a`` as a finite, non-empty 2d float64 matrix.

    Parameters
    ----------
    a : array_like
        Input matrix.

    name : str, optional
        Used in error messages.

    Returns
    -------
    a : numpy.array, shape=(rows, cols)
        C-contiguous float64 view or copy of the input.
    """
    try:
        return check_array(a, dtype=np.float64, order='C')
    except ValueError as e:
        raise ValueError("'{}' is not a valid matrix: {}".format(name, e))


def check_orthonormal(u, name='u', atol=1e-8):
    """Validates ``u`` as a tall matrix with orthonormal columns."""
    u = as_matrix(u, name=name)
    k = u.shape[1]
    if k > u.shape[0]:
        raise ValueError("'{}' has more columns than rows: {}".format(
            name, u.shape))
    deviation = np.max(np.abs(np.dot(u.T, u) - np.eye(k)))
    if deviation > atol:
        raise ValueError(
            "'{}' does not have orthonormal columns "
            "(max |u^T u - I| = {:.3e})".format(name, deviation))
    return u


def _fix_signs(q, r):
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.
    return q * signs, r * signs[:, np.newaxis]


def qr_thin(a):
    """Economic QR decomposition via Householder reflections.

    The signs are normalized so that ``diag(r) >= 0``, which makes the
    factorization unique for full column rank input.

    Parameters
    ----------
    a : array_like, shape=(m, k)
        Input with ``m >= k``.

    Returns
    -------
    result : QrResult
        ``q`` with orthonormal columns (m, k) and upper triangular ``r``
        (k, k).
    """
    a = as_matrix(a)
    m, k = a.shape
    if m < k:
        raise ValueError(
            'qr_thin needs at least as many rows as columns, '
            'got shape {}'.format(a.shape))
    q, r = linalg.qr(a, mode='economic', check_finite=False)
    q, r = _fix_signs(q, r)
    return QrResult(np.ascontiguousarray(q), np.ascontiguousarray(r))


def _rotation(alpha, beta, gamma):
    zeta = (beta - alpha) / (2. * gamma)
    if abs(zeta) > 1e150:
        t = 1. / (2. * zeta)
    else:
        t = np.copysign(1., zeta) / (abs(zeta) + np.sqrt(1. + zeta * zeta))
    c = 1. / np.sqrt(1. + t * t)
    return c, c * t


def svd_small(a, max_sweeps=30, tol=1e-14):
    """Full SVD of a small square matrix by one-sided (Hestenes) Jacobi.

    Columns of a working copy of ``a`` are rotated pairwise until all pairs
    are orthogonal to relative tolerance ``tol``. The column norms are the
    singular values.

    Parameters
    ----------
    a : array_like, shape=(k, k)
        Square input, meant for the r x r cores of the solver.

    max_sweeps : int, optional
        Maximum number of cyclic sweeps over all column pairs.

    tol : float, optional
        Off-diagonal tolerance on the cosine between two columns.

    Returns
    -------
    result : SvdResult
        ``u`` (k, k) orthogonal, ``sigma`` (k,) nonincreasing and
        ``v`` (k, k) orthogonal with ``a = u diag(sigma) v^T``.
    """
    a = as_matrix(a)
    k, n_cols = a.shape
    if k != n_cols:
        raise ValueError(
            'svd_small needs a square matrix, got shape {}'.format(a.shape))
    work = np.array(a, dtype=np.float64, order='F', copy=True)
    v = np.eye(k, order='F')
    if not np.any(work):
        return SvdResult(np.eye(k), np.zeros(k), np.eye(k))

    # rounding in the column products is of order k * eps
    threshold = max(tol, k * np.finfo(np.float64).eps)
    converged = k == 1
    for _ in range(max_sweeps):
        rotated = False
        for p in range(k - 1):
            for q in range(p + 1, k):
                col_p = work[:, p]
                col_q = work[:, q]
                gamma = np.dot(col_p, col_q)
                if gamma == 0.:
                    continue
                alpha = np.dot(col_p, col_p)
                beta = np.dot(col_q, col_q)
                if abs(gamma) <= threshold * np.sqrt(alpha * beta):
                    continue
                rotated = True
                c, s = _rotation(alpha, beta, gamma)
                tmp = col_p.copy()
                work[:, p] = c * tmp - s * col_q
                work[:, q] = s * tmp + c * col_q
                tmp = v[:, p].copy()
                v[:, p] = c * tmp - s * v[:, q]
                v[:, q] = s * tmp + c * v[:, q]
        if not rotated:
            converged = True
            break
    if not converged:
        raise ConvergenceError('Jacobi SVD did not converge', max_sweeps)

    sigma = np.sqrt(np.sum(work * work, axis=0))
    order = np.argsort(-sigma, kind='stable')
    sigma = sigma[order]
    work = work[:, order]
    v = v[:, order]

    nonzero = sigma > k * np.finfo(np.float64).eps * sigma[0]
    n_nonzero = int(np.sum(nonzero))
    u_nonzero = work[:, :n_nonzero] / sigma[:n_nonzero]
    if n_nonzero < k:
        completion = linalg.qr(np.hstack([u_nonzero, np.eye(k)]),
                               check_finite=False)[0]
        u = completion[:, :k].copy()
        u[:, :n_nonzero] = u_nonzero
    else:
        u = u_nonzero
    return SvdResult(np.ascontiguousarray(u),
                     sigma,
                     np.ascontiguousarray(v))


def _lsq_solve(coeff, rhs, rcond=1e-12):
    n_unknowns = coeff.shape[1]
    q, r, piv = linalg.qr(coeff,
                          mode='economic',
                          pivoting=True,
                          check_finite=False)
    diag = np.abs(np.diag(r))
    if len(diag) == 0 or diag[0] == 0.:
        return np.zeros(n_unknowns)
    rank = int(np.sum(diag > rcond * diag[0]))
    qtb = np.dot(q.T[:rank], rhs)
    z = np.empty(n_unknowns)
    if rank == n_unknowns:
        z[:] = linalg.solve_triangular(r[:rank, :rank], qtb,
                                       check_finite=False)
    else:
        # complete orthogonal decomposition: [R11 R12] = L^T Z^T
        z_basis, l_upper = linalg.qr(r[:rank, :].T,
                                     mode='economic',
                                     check_finite=False)
        w = linalg.solve_triangular(l_upper, qtb, trans='T',
                                    check_finite=False)
        z[:] = np.dot(z_basis, w)
    x = np.empty(n_unknowns)
    x[piv] = z
    return x


def lsq_solve(coeff, rhs, rcond=1e-12):
    """Least-squares solution of ``coeff * x = rhs``.

    Uses QR with column pivoting. The numerical rank is the number of
    pivots above ``rcond`` times the leading pivot; for rank-deficient
    systems the minimum-norm solution is returned.

    Parameters
    ----------
    coeff : array_like, shape=(q, k)
        Coefficient matrix.

    rhs : array_like, shape=(q,)
        Right hand side.

    rcond : float, optional
        Relative pivot threshold for the rank decision.

    Returns
    -------
    x : numpy.array, shape=(k,)
    """
    coeff = as_matrix(coeff, name='coeff')
    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.ndim != 1 or len(rhs) != coeff.shape[0]:
        raise ValueError(
            "'rhs' must be a vector of length {}, got shape {}".format(
                coeff.shape[0], rhs.shape))
    if not np.all(np.isfinite(rhs)):
        raise ValueError("'rhs' contains NaN or Inf")
    return _lsq_solve(coeff, rhs, rcond=rcond)


def truncated_svd(a, r0, random_state=None, n_iter=2, oversample=10):
    """Rank-``r0`` approximate SVD by block subspace iteration.

    Starting from a seeded Gaussian block ``G`` the iteration
    alternates ``X = orth(A Y)`` and ``Y = orth(A^T X)`` ``n_iter`` times
    and finishes with a Rayleigh-Ritz step on ``A Y``. The block carries
    ``oversample`` extra columns (capped at ``min(m, n)``); only the leading
    ``r0`` Ritz triplets are returned.

    Parameters
    ----------
    a : array_like, sparse matrix or scipy.sparse.linalg.LinearOperator
        Anything accepted by ``aslinearoperator``; only products with
        blocks of vectors are used.

    r0 : int
        Target rank, ``r0 <= min(m, n)``.

    random_state : None, int or numpy.random.RandomState
        If int, random_state is the seed used by the random number generator;
        If RandomState instance, random_state is the random number generator;
        If None, the random number generator is the RandomState instance used
        by np.random.

    n_iter : int, optional
        Number of subspace passes.

    oversample : int, optional
        Extra columns of the random block.

    Returns
    -------
    left : numpy.array, shape=(m, r0)
    sigma : numpy.array, shape=(r0,)
    right : numpy.array, shape=(n, r0)
    """
    operator = aslinearoperator(a)
    m, n = operator.shape
    r0 = int(r0)
    if r0 < 1 or r0 > min(m, n):
        raise ValueError(
            "'r0'={} has to be in [1, min(m, n)={}]".format(r0, min(m, n)))
    if n_iter < 0:
        raise ValueError("'n_iter' has to be >= 0")
    if oversample < 0:
        raise ValueError("'oversample' has to be >= 0")
    width = min(r0 + int(oversample), m, n)
    random_state = check_random_state(random_state)
    y = random_state.normal(size=(n, width))
    for _ in range(n_iter):
        x = qr_thin(np.asarray(operator.matmat(y))).q
        y = qr_thin(np.asarray(operator.rmatmat(x))).q
    basis = qr_thin(np.asarray(operator.matmat(y)))
    core = svd_small(basis.r)
    left = np.dot(basis.q, core.u[:, :r0])
    right = np.dot(y, core.v[:, :r0])
    return left, core.sigma[:r0].copy(), right


def dense_svd(a, cap=DENSE_CAP):
    """Thin SVD of a (desk scale) dense matrix through QR and svd_small.

    Parameters
    ----------
    a : array_like, shape=(m, n)

    cap : int, optional
        Largest supported ``min(m, n)``.

    Returns
    -------
    result : SvdResult
        ``u`` (m, k), ``sigma`` (k,), ``v`` (n, k) with ``k = min(m, n)``.
    """
    a = as_matrix(a)
    m, n = a.shape
    if min(m, n) > cap:
        raise UnsupportedAtScaleError('dense_svd', (m, n), cap)
    if m >= n:
        qr = qr_thin(a)
        core = svd_small(qr.r)
        return SvdResult(np.dot(qr.q, core.u), core.sigma, core.v)
    qr = qr_thin(a.T)
    core = svd_small(qr.r)
    return SvdResult(core.v, core.sigma, np.dot(qr.q, core.u))


def singular_values(a, cap=DENSE_CAP):
    return dense_svd(a, cap=cap).sigma


def spectral_norm(a,
                  random_state=None,
                  cap=DENSE_CAP,
                  tol=1e-10,
                  max_iter=1000):
    """Spectral norm ``||a||_2``.

    Dense inputs with ``min(m, n) <= cap`` go through ``dense_svd``; larger
    and sparse ones use power iteration on ``a^T a`` from a seeded start
    vector.
    """
    if sparse.issparse(a):
        operator = aslinearoperator(a)
    else:
        a = as_matrix(a)
        if min(a.shape) <= cap:
            return float(singular_values(a, cap=cap)[0])
        operator = aslinearoperator(a)
    random_state = check_random_state(random_state)
    vec = random_state.normal(size=operator.shape[1])
    vec /= np.linalg.norm(vec)
    lam = 0.
    for _ in range(max_iter):
        w = operator.rmatvec(operator.matvec(vec))
        lam_new = np.linalg.norm(w)
        if lam_new == 0.:
            return 0.
        vec = w / lam_new
        if abs(lam_new - lam) <= tol * lam_new:
            lam = lam_new
            break
        lam = lam_new
    return float(np.sqrt(lam))
