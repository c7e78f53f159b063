import numpy as np


GLOBAL = 'global'
ROWCOL = 'rowcol'
NONE = 'none'


class SparseCorrection(object):
    """Sparse outlier estimate ``S_t`` as an explicit entry list.

    Attributes
    ----------
    rows, cols : numpy.intarray, shape=(n_selected,)
        Indices of the selected entries, sorted by (row, col).

    values : numpy.array, shape=(n_selected,)
        Values of ``S_t``; for estimates produced by the thresholding
        functions these are the residuals at the selected entries.

    entry_ids : None or numpy.intarray, shape=(n_selected,)
        Entry-ids in the observation store the residual was computed on.
        ``None`` for corrections that are not tied to an observation set
        (e.g. the ground truth ``S_*``).

    strategy : str
        ``'global'``, ``'rowcol'``, ``'none'`` or ``'given'``.
    """
    def __init__(self, rows, cols, values, entry_ids=None, strategy='given'):
        order = np.lexsort((cols, rows))
        self.rows = np.asarray(rows, dtype=np.int64)[order]
        self.cols = np.asarray(cols, dtype=np.int64)[order]
        self.values = np.asarray(values, dtype=np.float64)[order]
        if entry_ids is not None:
            entry_ids = np.asarray(entry_ids, dtype=np.int64)[order]
        self.entry_ids = entry_ids
        self.strategy = strategy

    @classmethod
    def empty(cls, strategy=NONE):
        return cls(np.zeros(0, dtype=np.int64),
                   np.zeros(0, dtype=np.int64),
                   np.zeros(0),
                   entry_ids=np.zeros(0, dtype=np.int64),
                   strategy=strategy)

    @classmethod
    def _from_residual(cls, residual, selected, strategy):
        selected = np.sort(selected)
        return cls(residual.rows[selected],
                   residual.cols[selected],
                   residual.values[selected],
                   entry_ids=residual.entry_ids[selected],
                   strategy=strategy)

    def __len__(self):
        return len(self.values)

    @property
    def support(self):
        return set(zip(self.rows.tolist(), self.cols.tolist()))

    def to_triplets(self):
        return [(int(i), int(j), float(v))
                for i, j, v in zip(self.rows, self.cols, self.values)]

    def to_dense(self, shape):
        dense = np.zeros(shape)
        dense[self.rows, self.cols] = self.values
        return dense

    def __repr__(self):
        return 'SparseCorrection(n_selected={}, strategy={!r})'.format(
            len(self), self.strategy)


def _global_order(residual):
    magnitude = np.abs(residual.values)
    # largest magnitude first, ties by (row, col)
    return np.lexsort((residual.cols, residual.rows, -magnitude)), magnitude


def threshold_global(residual, s):
    """``T_s``: the ``s`` entries with the largest absolute residual.

    Parameters
    ----------
    residual : Residual
        Residual over the observed entries.

    s : int
        Sparsity budget, ``s <= n_entries``.

    Returns
    -------
    correction : SparseCorrection
        At most ``s`` entries; entries with zero residual are never
        selected. Ties are broken by the smallest (row, col).
    """
    s = int(s)
    if s < 0:
        raise ValueError("'s' has to be >= 0")
    if s > len(residual.values):
        raise ValueError(
            "'s'={} exceeds the number of observed entries {}".format(
                s, len(residual.values)))
    order, magnitude = _global_order(residual)
    top = order[:s]
    top = top[magnitude[top] > 0.]
    return SparseCorrection._from_residual(residual, top, GLOBAL)


def _rank_within(groups, others, magnitude):
    order = np.lexsort((others, -magnitude, groups))
    sorted_groups = groups[order]
    starts = np.searchsorted(sorted_groups, sorted_groups, side='left')
    ranks = np.empty(len(order), dtype=np.int64)
    ranks[order] = np.arange(len(order)) - starts
    return ranks


def threshold_rowcol(residual, k, cap):
    """Entries among the top-``k`` of both their row and their column.

    Unobserved entries count as zero residual, so only observed entries
    with nonzero residual can qualify. Within a row ties are broken by the
    column index, within a column by the row index. If more than ``cap``
    entries qualify, the ``cap`` largest are kept.

    Parameters
    ----------
    residual : Residual
        Residual over the observed entries.

    k : int
        Number of candidates per row and per column, ``k >= 1``.

    cap : int
        Maximum number of selected entries.

    Returns
    -------
    correction : SparseCorrection
    """
    k = int(k)
    cap = int(cap)
    if k < 1:
        raise ValueError("'k' has to be >= 1")
    if cap < 0:
        raise ValueError("'cap' has to be >= 0")
    magnitude = np.abs(residual.values)
    row_rank = _rank_within(residual.rows, residual.cols, magnitude)
    col_rank = _rank_within(residual.cols, residual.rows, magnitude)
    qualified = (row_rank < k) & (col_rank < k) & (magnitude > 0.)
    selected = np.flatnonzero(qualified)
    if len(selected) > cap:
        order, _ = _global_order(residual)
        order = order[qualified[order]]
        selected = order[:cap]
    return SparseCorrection._from_residual(residual, selected, ROWCOL)


class OutlierPolicy(object):
    """Strategy that turns a residual into the outlier estimate ``S_t``.

    Parameters
    ----------
    strategy : {'global', 'rowcol', 'none'}
        ``'global'`` is ``T_s`` with budget ``s``; ``'rowcol'`` selects the
        intersection of the row-wise and column-wise top-``k`` with
        ``cap=s``; ``'none'`` never selects anything.

    s : int
        Sparsity budget.

    k : None or int, optional
        Row/column candidates for ``'rowcol'``.
    """
    available_strategies = (GLOBAL, ROWCOL, NONE)

    def __init__(self, strategy=GLOBAL, s=0, k=None):
        strategy = strategy.lower()
        if strategy not in self.available_strategies:
            raise ValueError(
                '{} invalid outlier strategy, use one of {}'.format(
                    strategy, self.available_strategies))
        if s < 0:
            raise ValueError("'s' has to be >= 0")
        if strategy == ROWCOL:
            if k is None or k < 1:
                raise ValueError(
                    "'k' >= 1 is needed for the 'rowcol' strategy")
        self.strategy = strategy
        self.s = int(s)
        self.k = k

    def select(self, residual):
        if self.strategy == NONE:
            return SparseCorrection.empty(NONE)
        elif self.strategy == GLOBAL:
            return threshold_global(residual, min(self.s,
                                                  len(residual.values)))
        return threshold_rowcol(residual, self.k, self.s)

    def __call__(self, residual):
        return self.select(residual)

    def __repr__(self):
        return 'OutlierPolicy(strategy={!r}, s={}, k={})'.format(
            self.strategy, self.s, self.k)
