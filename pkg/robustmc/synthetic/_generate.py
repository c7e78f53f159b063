import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.random import MT19937, RandomState, SeedSequence

from ..exceptions import NumericalFailure, UnsupportedAtScaleError
from ..linalg import check_orthonormal, qr_thin, svd_small
from ..observation import ObservedMatrix
from ..outlier import SparseCorrection


DENSE_CAP = 10 ** 7

FACTORS_STREAM = 0
CORRUPTION_STREAM = 1
MASK_STREAM = 2


def sub_stream(seed, label):
    """Independent ``RandomState`` for ``label`` derived from ``seed``.

    Streams with different labels never share state, so e.g. changing
    ``rho`` leaves the observation mask untouched.
    """
    if isinstance(seed, SeedSequence):
        entropy = seed.entropy
    else:
        entropy = seed
    return RandomState(MT19937(SeedSequence(entropy, spawn_key=(label,))))


@dataclass
class InstanceSpec:
    """Parameters of a synthetic instance.

    Parameters
    ----------
    d_rows, d_cols : int
        Shape of M.

    r : int
        Rank of L*.

    p : float
        Observation probability in (0, 1].

    rho : float
        Corruption probability in [0, 1).

    seed : None or int
        Master seed of the three sub-streams.

    strict_sparsity : bool, optional
        If True every row carries exactly ``floor(rho * d_cols)`` corrupted
        entries instead of Bernoulli(rho) ones.
    """
    d_rows: int
    d_cols: int
    r: int
    p: float
    rho: float = 0.
    seed: Optional[int] = None
    strict_sparsity: bool = False

    def __post_init__(self):
        for name in ('d_rows', 'd_cols', 'r'):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError("'{}' has to be a positive integer, "
                                 "got {!r}".format(name, value))
            setattr(self, name, int(value))
        if self.r > min(self.d_rows, self.d_cols):
            raise ValueError("'r'={} exceeds min(d_rows, d_cols)={}".format(
                self.r, min(self.d_rows, self.d_cols)))
        if not 0. < self.p <= 1.:
            raise ValueError("'p' has to be in (0, 1], got {!r}".format(
                self.p))
        if not 0. <= self.rho < 1.:
            raise ValueError("'rho' has to be in [0, 1), got {!r}".format(
                self.rho))
        if self.p * self.d_cols <= 2 * self.r:
            warnings.warn('p * d_cols = {:g} is not above 2r = {}; rows '
                          'will be underdetermined'.format(
                              self.p * self.d_cols, 2 * self.r))

    @property
    def shape(self):
        return (self.d_rows, self.d_cols)

    @property
    def d(self):
        return max(self.d_rows, self.d_cols)


@dataclass
class GroundTruth:
    """Ground truth ``L* = u_star diag(sigma_star) v_star^T`` and ``S*``.

    ``s_star`` holds all corruptions if ``s_star_complete``, otherwise only
    the observed ones; ``s_star_observed`` always holds the observed ones
    with their entry-ids. ``l_star`` is only materialized for instances
    with at most ``DENSE_CAP`` entries.
    """
    u_star: np.ndarray
    sigma_star: np.ndarray
    v_star: np.ndarray
    s_star: SparseCorrection
    s_star_observed: SparseCorrection
    omega: Tuple[np.ndarray, np.ndarray]
    p: float
    rho: float
    s_star_complete: bool = True
    l_star: Optional[np.ndarray] = None
    spec: Optional[InstanceSpec] = None

    @property
    def shape(self):
        return (self.u_star.shape[0], self.v_star.shape[0])

    @property
    def rank(self):
        return len(self.sigma_star)

    def dense_l(self, cap=DENSE_CAP):
        if self.l_star is not None:
            return self.l_star
        m, n = self.shape
        if m * n > cap:
            raise UnsupportedAtScaleError('dense L*', self.shape, cap)
        return np.dot(self.u_star * self.sigma_star, self.v_star.T)

    def dense_s(self, cap=DENSE_CAP):
        m, n = self.shape
        if m * n > cap:
            raise UnsupportedAtScaleError('dense S*', self.shape, cap)
        if not self.s_star_complete:
            raise ValueError('Only the observed part of S* is stored')
        return self.s_star.to_dense(self.shape)

    def dense_m(self, cap=DENSE_CAP):
        return self.dense_l(cap=cap) + self.dense_s(cap=cap)


def economy_svd(a, b):
    """``u diag(sigma) v^T = a b^T`` for tall ``a`` (m, r) and ``b`` (n, r).
    """
    qa = qr_thin(a)
    qb = qr_thin(b)
    core = svd_small(np.dot(qa.r, qb.r.T))
    return np.dot(qa.q, core.u), core.sigma, np.dot(qb.q, core.v)


def generate(spec, dense_cap=DENSE_CAP):
    """Draws ``M = L* + S*`` and the observed entries.

    L* = A B^T with A (m, r) and B (n, r) i.i.d. Gaussian with variance
    ``1 / max(m, n)``. Entries of S* are nonzero with probability ``rho``
    (or exactly ``floor(rho * n)`` per row with ``strict_sparsity``) and
    uniform on ``[-r / 2d, r / 2d]``. Every entry is observed with
    probability ``p``. Mask and corruptions are drawn row by row from
    separate streams.

    Parameters
    ----------
    spec : InstanceSpec
        Instance parameters.

    dense_cap : int, optional
        Largest ``m * n`` for which L* and the complete S* are kept.

    Returns
    -------
    obs : ObservedMatrix
        The observed entries of M.

    truth : GroundTruth
    """
    if not isinstance(spec, InstanceSpec):
        raise ValueError("'spec' has to be of type InstanceSpec!")
    m, n = spec.shape
    r = spec.r
    d = spec.d
    seed = spec.seed
    if seed is None:
        seed = SeedSequence()
    factor_rng = sub_stream(seed, FACTORS_STREAM)
    corruption_rng = sub_stream(seed, CORRUPTION_STREAM)
    mask_rng = sub_stream(seed, MASK_STREAM)

    scale = np.sqrt(1. / d)
    a = factor_rng.normal(scale=scale, size=(m, r))
    b = factor_rng.normal(scale=scale, size=(n, r))
    u_star, sigma_star, v_star = economy_svd(a, b)
    if not sigma_star[-1] > 0.:
        raise NumericalFailure('Generated L* is rank deficient')

    keep_all = m * n <= dense_cap
    half_width = r / (2. * d)
    n_strict = int(np.floor(spec.rho * n))

    rows, cols, values = [], [], []
    s_rows, s_cols, s_values = [], [], []
    so_ids, so_values = [], []
    offset = 0
    for i in range(m):
        observed = np.flatnonzero(mask_rng.random_sample(n) < spec.p)
        if spec.strict_sparsity:
            corrupted = np.sort(corruption_rng.permutation(n)[:n_strict])
        else:
            corrupted = np.flatnonzero(
                corruption_rng.random_sample(n) < spec.rho)
        corruption = corruption_rng.uniform(-half_width, half_width,
                                            size=len(corrupted))
        _, at_obs, at_cor = np.intersect1d(observed, corrupted,
                                           assume_unique=True,
                                           return_indices=True)
        row_values = np.dot(b[observed], a[i])
        row_values[at_obs] += corruption[at_cor]

        rows.append(np.full(len(observed), i, dtype=np.int64))
        cols.append(observed)
        values.append(row_values)
        if keep_all:
            s_rows.append(np.full(len(corrupted), i, dtype=np.int64))
            s_cols.append(corrupted)
            s_values.append(corruption)
        else:
            s_rows.append(np.full(len(at_obs), i, dtype=np.int64))
            s_cols.append(observed[at_obs])
            s_values.append(corruption[at_cor])
        so_ids.append(offset + at_obs)
        so_values.append(corruption[at_cor])
        offset += len(observed)

    obs = ObservedMatrix.from_arrays(m, n,
                                     np.concatenate(rows),
                                     np.concatenate(cols),
                                     np.concatenate(values))
    so_ids = np.concatenate(so_ids).astype(np.int64)
    s_star = SparseCorrection(np.concatenate(s_rows),
                              np.concatenate(s_cols),
                              np.concatenate(s_values))
    s_star_observed = SparseCorrection(obs.rows[so_ids],
                                       obs.cols[so_ids],
                                       np.concatenate(so_values),
                                       entry_ids=so_ids)
    l_star = np.dot(a, b.T) if keep_all else None
    truth = GroundTruth(u_star=u_star,
                        sigma_star=sigma_star,
                        v_star=v_star,
                        s_star=s_star,
                        s_star_observed=s_star_observed,
                        omega=(obs.rows, obs.cols),
                        p=spec.p,
                        rho=spec.rho,
                        s_star_complete=keep_all,
                        l_star=l_star,
                        spec=spec)
    return obs, truth


def incoherence(u):
    """Incoherence ``mu = (m / r) max_i ||u^T e_i||^2`` of an orthonormal
    basis ``u`` (m, r)."""
    u = check_orthonormal(u)
    m, r = u.shape
    return float(m) / r * float(np.max(np.einsum('ij,ij->i', u, u)))


def example_one(n, rho):
    """Closed-form instance with ``L* = 1 1^T / n`` and a circulant ``S*``.

    ``S* = rho / 4 * C`` where ``C`` has 2 on the diagonal and -1 on the
    two cyclic off-diagonals, so ``S* 1 = 0`` and ``||S*|| = |rho|``. All
    entries are observed.

    Parameters
    ----------
    n : int
        Even size, ``n >= 4``.

    rho : float
        Scale in (-1, 1).
    """
    if int(n) != n or n < 4 or n % 2 != 0:
        raise ValueError("'n' has to be an even integer >= 4, got "
                         "{!r}".format(n))
    if not -1. < rho < 1.:
        raise ValueError("'rho' has to be in (-1, 1), got {!r}".format(rho))
    n = int(n)
    idx = np.arange(n)
    s_rows = np.concatenate([idx, idx, idx])
    s_cols = np.concatenate([idx, (idx + 1) % n, (idx - 1) % n])
    s_values = np.concatenate([np.full(n, 2.), np.full(2 * n, -1.)])
    s_values *= rho / 4.
    if rho == 0.:
        s_rows = s_cols = np.zeros(0, dtype=np.int64)
        s_values = np.zeros(0)
    s_star = SparseCorrection(s_rows, s_cols, s_values)

    l_star = np.full((n, n), 1. / n)
    dense_m = l_star + s_star.to_dense((n, n))
    rows, cols = np.divmod(np.arange(n * n), n)
    obs = ObservedMatrix.from_arrays(n, n, rows, cols, dense_m.ravel())
    s_star_observed = SparseCorrection(s_star.rows, s_star.cols,
                                       s_star.values,
                                       entry_ids=s_star.rows * n + s_star.cols)
    ones = np.full((n, 1), 1. / np.sqrt(n))
    truth = GroundTruth(u_star=ones,
                        sigma_star=np.ones(1),
                        v_star=ones.copy(),
                        s_star=s_star,
                        s_star_observed=s_star_observed,
                        omega=(obs.rows, obs.cols),
                        p=1.,
                        rho=rho,
                        l_star=l_star)
    return obs, truth
