'''Recovery errors and theory-facing diagnostics of an instance.'''
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..linalg import as_matrix, dense_svd, qr_thin, spectral_norm
from ..linalg._dense import DENSE_CAP
from .angles import AngleReport, sin_theta


_ROW_CHUNK = 1024


def frobenius_norm(a):
    if sparse.issparse(a):
        data = a.tocsr().data
        return float(np.sqrt(np.dot(data, data)))
    a = np.asarray(a, dtype=np.float64)
    return float(np.sqrt(np.sum(a * a)))


def stable_rank(a, random_state=None, cap=DENSE_CAP):
    """Stable rank ``||a||_F^2 / ||a||_2^2``.

    Parameters
    ----------
    a : array_like or sparse matrix
        Nonzero matrix.

    random_state : None, int or numpy.random.RandomState
        Start vector of the power iteration used for large inputs.

    cap : int, optional
        Dense inputs with ``min(m, n) <= cap`` use a dense SVD.
    """
    if not sparse.issparse(a):
        a = as_matrix(a)
    fro = frobenius_norm(a)
    if fro == 0.:
        raise ValueError('The stable rank of a zero matrix is undefined')
    spectral = spectral_norm(a, random_state=random_state, cap=cap)
    return (fro / spectral) ** 2


def _projected_sine(u, v):
    # ||(I - u u^T) v||, accurate for small angles
    return spectral_norm(v - np.dot(u, np.dot(u.T, v)))


@dataclass
class Theorem1Report:
    """Sufficient conditions for the best rank-r approximation of M to
    recover the singular subspaces of L*.

    ``holds`` is ``cond_a_lhs < cond_a_rhs and cond_b_lhs < cond_b_rhs``;
    ``theta_u`` / ``theta_v`` are ``||sin Theta||`` between the top-r
    singular subspaces of M and those of L*, bounded by ``eta`` when the
    conditions hold.
    """
    cond_a_lhs: float
    cond_a_rhs: float
    cond_b_lhs: float
    cond_b_rhs: float
    eta: float
    holds: bool
    theta_u: float
    theta_v: float
    bound_holds: bool
    best_rank_error: float


def theorem1_check(truth, cap=DENSE_CAP, atol=1e-10):
    """Checks the low-rank/sparse separation conditions on a desk scale
    ground truth.

    Parameters
    ----------
    truth : GroundTruth
        Ground truth with a materializable M = L* + S*.

    cap : int, optional
        Largest supported ``min(m, n)``.

    atol : float, optional
        Slack of ``bound_holds``.

    Returns
    -------
    report : Theorem1Report
    """
    m_dense = truth.dense_m()
    svd = dense_svd(m_dense, cap=cap)
    r = truth.rank
    sigma = svd.sigma
    sigma_next = sigma[r] if r < len(sigma) else 0.
    u_star = truth.u_star
    v_star = truth.v_star
    s_dense = truth.dense_s()

    projected = s_dense - np.dot(u_star, np.dot(u_star.T, s_dense))
    projected -= np.dot(np.dot(projected, v_star), v_star.T)
    cond_a_lhs = spectral_norm(projected, cap=cap)
    cond_a_rhs = float(truth.sigma_star[-1])
    cond_b_lhs = max(spectral_norm(np.dot(s_dense, v_star), cap=cap),
                     spectral_norm(np.dot(s_dense.T, u_star), cap=cap))
    cond_b_rhs = float(sigma[r - 1] - sigma_next)
    if cond_b_rhs > cond_b_lhs:
        eta = cond_b_lhs / (cond_b_rhs - cond_b_lhs)
    else:
        eta = np.inf

    u_top = svd.u[:, :r]
    v_top = svd.v[:, :r]
    theta_u = _projected_sine(u_star, u_top)
    theta_v = _projected_sine(v_star, v_top)
    best_rank = np.dot(u_top * sigma[:r], v_top.T)
    return Theorem1Report(
        cond_a_lhs=cond_a_lhs,
        cond_a_rhs=cond_a_rhs,
        cond_b_lhs=cond_b_lhs,
        cond_b_rhs=cond_b_rhs,
        eta=eta,
        holds=bool(cond_a_lhs < cond_a_rhs and cond_b_lhs < cond_b_rhs),
        theta_u=theta_u,
        theta_v=theta_v,
        bound_holds=bool(max(theta_u, theta_v) <= eta + atol),
        best_rank_error=frobenius_norm(best_rank - truth.dense_l()))


@dataclass
class RecoveryReport:
    rel_frobenius: float
    max_norm: float
    angle_x: AngleReport
    angle_y: AngleReport
    rank_mismatch: bool

    @property
    def max_angle(self):
        """``max{||sin Theta(X, U*)||, ||sin Theta(Y, V*)||}``."""
        return max(self.angle_x.norm, self.angle_y.norm)


def _difference_frobenius(x, sigma, y, u, sigma_star, v):
    left = np.hstack([x, u])
    right = np.hstack([y, v])
    core = np.concatenate([sigma, -sigma_star])
    if left.shape[0] < left.shape[1] or right.shape[0] < right.shape[1]:
        return frobenius_norm(np.dot(left * core, right.T))
    qr_left = qr_thin(left)
    qr_right = qr_thin(right)
    return frobenius_norm(np.dot(qr_left.r * core, qr_right.r.T))


def _difference_max(x, sigma, y, u, sigma_star, v):
    xs = x * sigma
    us = u * sigma_star
    largest = 0.
    for start in range(0, x.shape[0], _ROW_CHUNK):
        block = slice(start, start + _ROW_CHUNK)
        diff = np.dot(xs[block], y.T) - np.dot(us[block], v.T)
        largest = max(largest, float(np.max(np.abs(diff), initial=0.)))
    return largest


def recovery_error(factors, truth):
    """Compares recovered factors to the ground truth without forming
    m x n matrices for the Frobenius error.

    Parameters
    ----------
    factors : FactorTriple
        Recovered ``x diag(sigma) y^T``.

    truth : GroundTruth

    Returns
    -------
    report : RecoveryReport
        Angles are computed between the leading ``min(rank, r*)`` columns;
        ``rank_mismatch`` flags differing ranks.
    """
    x = np.asarray(factors.x, dtype=np.float64)
    y = np.asarray(factors.y, dtype=np.float64)
    sigma = np.asarray(factors.sigma, dtype=np.float64)
    u, v = truth.u_star, truth.v_star
    sigma_star = truth.sigma_star
    if x.shape[0] != u.shape[0] or y.shape[0] != v.shape[0]:
        raise ValueError(
            'Factors of a {}x{} matrix cannot be compared to a {}x{} '
            'ground truth'.format(x.shape[0], y.shape[0],
                                  u.shape[0], v.shape[0]))
    l_norm = float(np.sqrt(np.dot(sigma_star, sigma_star)))
    rel_frobenius = _difference_frobenius(x, sigma, y,
                                          u, sigma_star, v) / l_norm
    max_norm = _difference_max(x, sigma, y, u, sigma_star, v)
    k = min(len(sigma), len(sigma_star))
    return RecoveryReport(rel_frobenius=rel_frobenius,
                          max_norm=max_norm,
                          angle_x=sin_theta(x[:, :k], u[:, :k]),
                          angle_y=sin_theta(y[:, :k], v[:, :k]),
                          rank_mismatch=len(sigma) != len(sigma_star))
