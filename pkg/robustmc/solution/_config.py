from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from ..outlier import OutlierPolicy, SparseCorrection


OUTLIER_REFRESH_MODES = ('every', 'stagnation')


def _check_count(name, value, minimum):
    try:
        valid = not isinstance(value, bool) and int(value) == value
    except (TypeError, ValueError):
        valid = False
    if not valid or value < minimum:
        raise ValueError("'{}' has to be an integer >= {}, got {!r}".format(
            name, minimum, value))
    return int(value)


@dataclass
class SolverConfig:
    """Parameters of the alternating solver.

    Parameters
    ----------
    s : int
        Sparsity budget of the outlier estimate.

    r0 : int
        Initial (over-)estimate of the rank.

    kappa : float, optional
        Condition number cap; singular values with
        ``kappa * sigma_j < sigma_1`` are dropped at a rank check.

    tol : float, optional
        Absolute tolerance on the residual ``tau``.

    max_iters : int, optional
        Maximum number of iterations, counting the initialization as the
        first one.

    stagnation_window : int, optional
        ``w`` in the stagnation test ``tau_t / tau_{t-w} > ratio``.

    stagnation_ratio : float, optional
        Ratio in (0, 1) of the stagnation test.

    rank_check_period : int, optional
        Rank checks run on every ``rank_check_period``-th iteration and
        after a stagnation was detected.

    min_row_obs_factor : float, optional
        Rows/columns with fewer than ``min_row_obs_factor * r`` effective
        observations trigger a ``ThinRowWarning``.

    seed : None, int or numpy.random.RandomState
        If int, random_state is the seed used by the random number generator;
        If RandomState instance, random_state is the random number generator;
        If None, the random number generator is the RandomState instance used
        by np.random.

    outlier_strategy : {'global', 'rowcol', 'none'}, optional
        See ``OutlierPolicy``.

    outlier_k : None or int, optional
        Row/column candidates for ``outlier_strategy='rowcol'``.

    outlier_refresh : {'every', 'stagnation'}, optional
        ``'every'`` reselects the outliers in every iteration. With
        ``'stagnation'`` the support is only reselected after a stagnation
        that was not resolved by a rank drop; in between the values follow
        the residual on the held support.

    subsample_per_row : int, optional
        If > 0, rows/columns with more effective observations are solved
        on a random subset of this size.

    threads : int, optional
        Number of threads for the row-wise solves.

    n_init_iter : int, optional
        Subspace passes of the truncated SVD in the initialization.

    init_oversample : int, optional
        Extra columns of the random block of that truncated SVD.

    localization_fraction : float, optional
        Share of the coordinates, in (0, 1], that a localized direction
        concentrates on.

    localization_mass : None or float, optional
        A direction other than the leading one whose left or right singular
        vector puts at least this share of its squared mass on the largest
        ``ceil(localization_fraction * dim)`` coordinates is dropped at a
        rank check. Such directions fit isolated outliers, not the low rank
        part. ``None`` disables the test.
    """
    s: int
    r0: int
    kappa: float = 1e4
    tol: float = 1e-7
    max_iters: int = 500
    stagnation_window: int = 5
    stagnation_ratio: float = 0.9
    rank_check_period: int = 5
    min_row_obs_factor: float = 2.0
    seed: Optional[object] = None
    outlier_strategy: str = 'global'
    outlier_k: Optional[int] = None
    outlier_refresh: str = 'every'
    subsample_per_row: int = 0
    threads: int = 1
    n_init_iter: int = 2
    init_oversample: int = 10
    localization_fraction: float = 0.02
    localization_mass: Optional[float] = 0.9

    def __post_init__(self):
        self.s = _check_count('s', self.s, 0)
        self.r0 = _check_count('r0', self.r0, 1)
        self.max_iters = _check_count('max_iters', self.max_iters, 1)
        self.stagnation_window = _check_count('stagnation_window',
                                              self.stagnation_window, 1)
        self.rank_check_period = _check_count('rank_check_period',
                                              self.rank_check_period, 1)
        self.subsample_per_row = _check_count('subsample_per_row',
                                              self.subsample_per_row, 0)
        self.threads = _check_count('threads', self.threads, 1)
        self.n_init_iter = _check_count('n_init_iter', self.n_init_iter, 0)
        self.init_oversample = _check_count('init_oversample',
                                            self.init_oversample, 0)
        if not self.kappa > 1.:
            raise ValueError("'kappa' has to be > 1, got {!r}".format(
                self.kappa))
        if not (self.tol > 0. and np.isfinite(self.tol)):
            raise ValueError("'tol' has to be > 0, got {!r}".format(self.tol))
        if not 0. < self.stagnation_ratio < 1.:
            raise ValueError(
                "'stagnation_ratio' has to be in (0, 1), got {!r}".format(
                    self.stagnation_ratio))
        if not self.min_row_obs_factor >= 1.:
            raise ValueError(
                "'min_row_obs_factor' has to be >= 1, got {!r}".format(
                    self.min_row_obs_factor))
        if not 0. < self.localization_fraction <= 1.:
            raise ValueError(
                "'localization_fraction' has to be in (0, 1], got {!r}".format(
                    self.localization_fraction))
        if self.localization_mass is not None \
                and not 0.5 < self.localization_mass <= 1.:
            raise ValueError(
                "'localization_mass' has to be None or in (0.5, 1], "
                "got {!r}".format(self.localization_mass))
        if self.outlier_refresh not in OUTLIER_REFRESH_MODES:
            raise ValueError(
                "'outlier_refresh' has to be one of {}, got {!r}".format(
                    OUTLIER_REFRESH_MODES, self.outlier_refresh))
        if self.outlier_k is not None:
            self.outlier_k = _check_count('outlier_k', self.outlier_k, 1)
        # constructing the policy validates strategy and k
        self.policy()

    def policy(self):
        return OutlierPolicy(strategy=self.outlier_strategy,
                             s=self.s,
                             k=self.outlier_k)

    @property
    def budget(self):
        """Number of observations reserved for outliers."""
        if self.outlier_strategy == 'none':
            return 0
        return self.s

    def to_dict(self):
        seed = self.seed if self.seed is None or isinstance(self.seed, int) \
            else 'RandomState'
        return {'s': self.s,
                'r0': self.r0,
                'kappa': self.kappa,
                'tol': self.tol,
                'max_iters': self.max_iters,
                'stagnation_window': self.stagnation_window,
                'stagnation_ratio': self.stagnation_ratio,
                'rank_check_period': self.rank_check_period,
                'min_row_obs_factor': self.min_row_obs_factor,
                'seed': seed,
                'outlier_strategy': self.outlier_strategy,
                'outlier_k': self.outlier_k,
                'outlier_refresh': self.outlier_refresh,
                'subsample_per_row': self.subsample_per_row,
                'threads': self.threads,
                'n_init_iter': self.n_init_iter,
                'init_oversample': self.init_oversample,
                'localization_fraction': self.localization_fraction,
                'localization_mass': self.localization_mass}


@dataclass
class FactorTriple:
    """The model ``x diag(sigma) y^T`` with orthonormal ``x`` and ``y``."""
    x: np.ndarray
    sigma: np.ndarray
    y: np.ndarray

    @property
    def rank(self):
        return len(self.sigma)

    @property
    def shape(self):
        return (self.x.shape[0], self.y.shape[0])

    def orthonormality_error(self):
        eye = np.eye(self.rank)
        return max(np.max(np.abs(np.dot(self.x.T, self.x) - eye),
                          initial=0.),
                   np.max(np.abs(np.dot(self.y.T, self.y) - eye),
                          initial=0.))

    def to_dense(self):
        return np.dot(self.x * self.sigma, self.y.T)


@dataclass
class TraceRecord:
    iter: int
    tau: float
    rank: int
    dropped: int
    wall_ms: float


@dataclass
class SolverState:
    """State of the solver after iteration ``iter``.

    ``drop_events`` lists the iterations in which the outliers were
    reselected because a stagnation was not resolved by a rank drop.
    ``final_rank_check`` requests a rank check in the next iteration; it
    is set by ``run`` when the tolerance is met with excess directions left.
    """
    iter: int
    factors: FactorTriple
    correction: SparseCorrection
    tau: float
    rank_history: List[Tuple[int, int]] = field(default_factory=list)
    drop_events: List[int] = field(default_factory=list)
    trace: List[TraceRecord] = field(default_factory=list)
    random_state: Optional[np.random.RandomState] = None
    pending_rank_check: bool = False
    stagnation_baseline: int = 1
    final_rank_check: bool = False

    @property
    def rank(self):
        return self.factors.rank

    @property
    def taus(self):
        return [record.tau for record in self.trace]


class Outcome(Enum):
    CONVERGED = 'Converged'
    MAX_ITERS = 'MaxIters'


@dataclass
class SolverResult:
    """Result of ``run``.

    Unpacks as ``state, factors, correction``.
    """
    state: SolverState
    outcome: Outcome
    relative_residual: float

    @property
    def factors(self):
        return self.state.factors

    @property
    def correction(self):
        return self.state.correction

    @property
    def converged(self):
        return self.outcome is Outcome.CONVERGED

    @property
    def n_iterations(self):
        return self.state.iter

    def __iter__(self):
        return iter((self.state, self.factors, self.correction))
