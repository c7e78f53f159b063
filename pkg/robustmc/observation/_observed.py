from collections import namedtuple

import numpy as np
from scipy import sparse


Residual = namedtuple('Residual',
                      ['entry_ids', 'rows', 'cols', 'values', 'norm', 'shape'])
Residual.__doc__ = '''Residual ``M_ij - x_i^T diag(sigma) y_j`` over a set of
observed entries, in entry-id order.'''

_CHUNK = 1 << 16


def _as_index_array(a, name):
    a = np.asarray(a)
    if a.size == 0:
        return np.zeros(0, dtype=np.int64)
    if not np.issubdtype(a.dtype, np.integer):
        as_int = a.astype(np.int64)
        if not np.all(as_int == a):
            raise ValueError("'{}' has to contain integers".format(name))
        a = as_int
    return a.astype(np.int64).ravel()


class ObservedMatrix(object):
    """The observed entries ``Pi_Omega(M)`` of an m x n matrix.

    Entries are stored sorted by (row, col); the position of an entry in
    this order is its entry-id. Observed zeros are kept as entries, absence
    means unobserved. Instances are immutable.

    Use ``ObservedMatrix.from_triplets`` or ``ObservedMatrix.from_arrays``
    to construct.

    Attributes
    ----------
    m, n : int
        Shape of the full matrix.

    rows, cols : numpy.intarray, shape=(n_entries,)
        0-based indices of the observed entries.

    values : numpy.array, shape=(n_entries,)
        Observed values.

    row_ptr : numpy.intarray, shape=(m + 1,)
        Entries of row ``i`` have the ids ``row_ptr[i]:row_ptr[i + 1]``.

    col_order : numpy.intarray, shape=(n_entries,)
        Entry-ids sorted by (col, row).

    col_ptr : numpy.intarray, shape=(n + 1,)
        ``col_order[col_ptr[j]:col_ptr[j + 1]]`` are the ids in column ``j``.
    """
    name = 'ObservedMatrix'

    def __init__(self, m, n, rows, cols, values):
        self.m = m
        self.n = n
        self.rows = rows
        self.cols = cols
        self.values = values
        self.row_ptr = np.searchsorted(rows, np.arange(m + 1))
        self.col_order = np.lexsort((rows, cols))
        self.col_ptr = np.searchsorted(cols[self.col_order],
                                       np.arange(n + 1))
        for arr in (self.rows, self.cols, self.values,
                    self.row_ptr, self.col_order, self.col_ptr):
            arr.setflags(write=False)

    @classmethod
    def from_arrays(cls, m, n, rows, cols, values):
        """Builds the observation store from index and value arrays.

        Parameters
        ----------
        m, n : int
            Shape of the full matrix.

        rows, cols : array_like of ints, shape=(n_entries,)
            0-based row and column indices.

        values : array_like, shape=(n_entries,)
            Observed values.
        """
        m, n = int(m), int(n)
        if m < 1 or n < 1:
            raise ValueError(
                'Matrix shape has to be positive, got ({}, {})'.format(m, n))
        rows = _as_index_array(rows, 'rows')
        cols = _as_index_array(cols, 'cols')
        values = np.asarray(values, dtype=np.float64).ravel()
        if not len(rows) == len(cols) == len(values):
            raise ValueError(
                "'rows', 'cols' and 'values' need the same length "
                "({}, {}, {})".format(len(rows), len(cols), len(values)))
        bad = (rows < 0) | (rows >= m) | (cols < 0) | (cols >= n)
        if np.any(bad):
            idx = np.flatnonzero(bad)[0]
            raise ValueError(
                'Entry ({}, {}) is out of range for shape ({}, {})'.format(
                    rows[idx], cols[idx], m, n))
        if not np.all(np.isfinite(values)):
            raise ValueError('Observed values have to be finite')
        order = np.lexsort((cols, rows))
        rows = rows[order]
        cols = cols[order]
        values = values[order]
        duplicated = (rows[1:] == rows[:-1]) & (cols[1:] == cols[:-1])
        if np.any(duplicated):
            idx = np.flatnonzero(duplicated)[0]
            raise ValueError('Duplicate entry ({}, {})'.format(
                rows[idx], cols[idx]))
        return cls(m, n, rows, cols, values)

    @classmethod
    def from_triplets(cls, m, n, triplets):
        """Builds the observation store from ``(row, col, value)`` tuples."""
        triplets = list(triplets)
        if len(triplets) == 0:
            return cls.from_arrays(m, n, [], [], [])
        rows, cols, values = zip(*triplets)
        return cls.from_arrays(m, n, rows, cols, values)

    @property
    def shape(self):
        return (self.m, self.n)

    @property
    def n_entries(self):
        return len(self.values)

    def __len__(self):
        return self.n_entries

    def row_entries(self, i):
        """Returns ``(cols, entry_ids)`` of the observations in row ``i``."""
        ids = np.arange(self.row_ptr[i], self.row_ptr[i + 1])
        return self.cols[ids], ids

    def col_entries(self, j):
        """Returns ``(rows, entry_ids)`` of the observations in column ``j``.
        """
        ids = self.col_order[self.col_ptr[j]:self.col_ptr[j + 1]]
        return self.rows[ids], ids

    def row_counts(self):
        return np.diff(self.row_ptr)

    def col_counts(self):
        return np.diff(self.col_ptr)

    def to_triplets(self):
        return [(int(i), int(j), float(v))
                for i, j, v in zip(self.rows, self.cols, self.values)]

    def to_sparse(self, values=None, exclude=None):
        """CSR representation of ``Pi_Omega(M)``.

        Parameters
        ----------
        values : None or array_like, shape=(n_entries,), optional
            Values to use instead of the observed ones.

        exclude : None or array_like of entry-ids, optional
            Entries that are set to zero.
        """
        if values is None:
            values = self.values
        values = np.array(values, dtype=np.float64)
        if exclude is not None and len(exclude) > 0:
            values[np.asarray(exclude, dtype=np.int64)] = 0.
        return sparse.csr_matrix((values, (self.rows, self.cols)),
                                 shape=self.shape)

    def frobenius_norm(self):
        return float(np.sqrt(np.dot(self.values, self.values)))

    def __eq__(self, other):
        if not isinstance(other, ObservedMatrix):
            return NotImplemented
        return (self.shape == other.shape and
                np.array_equal(self.rows, other.rows) and
                np.array_equal(self.cols, other.cols) and
                np.array_equal(self.values, other.values))

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    __hash__ = None

    def __repr__(self):
        return '{}(m={}, n={}, n_entries={})'.format(
            self.name, self.m, self.n, self.n_entries)


class MaskedView(object):
    """``Omega_t = Omega \\ supp(S_t)``: an observation store with a set of
    entries excluded.

    Parameters
    ----------
    base : ObservedMatrix
        The full observation store.

    excluded : None or array_like of entry-ids
        Entries to leave out, typically the support of the current outlier
        estimate.
    """
    def __init__(self, base, excluded=None):
        self.base = base
        active = np.ones(base.n_entries, dtype=bool)
        if excluded is None:
            excluded = np.zeros(0, dtype=np.int64)
        excluded = _as_index_array(excluded, 'excluded')
        if len(excluded) > 0:
            if excluded.min() < 0 or excluded.max() >= base.n_entries:
                raise ValueError(
                    'Excluded entry-ids have to be in [0, {})'.format(
                        base.n_entries))
            active[excluded] = False
        active.setflags(write=False)
        self.excluded = np.unique(excluded)
        self.active = active

    @property
    def shape(self):
        return self.base.shape

    @property
    def effective_ids(self):
        return np.flatnonzero(self.active)

    @property
    def n_effective(self):
        return self.base.n_entries - len(self.excluded)

    def grouped(self, axis):
        """Effective entries grouped by row or by column.

        Parameters
        ----------
        axis : {'rows', 'cols'}
            ``'rows'`` groups by row (systems for X), ``'cols'`` by column
            (systems for Y).

        Returns
        -------
        ptr : numpy.intarray, shape=(n_groups + 1,)
            Group ``g`` spans ``ptr[g]:ptr[g + 1]``.

        other : numpy.intarray
            Column (resp. row) index of each grouped entry.

        values : numpy.array
            Observed value of each grouped entry.
        """
        base = self.base
        if axis == 'rows':
            ids = self.effective_ids
            ptr = np.searchsorted(base.rows[ids], np.arange(base.m + 1))
            other = base.cols[ids]
        elif axis == 'cols':
            ids = base.col_order[self.active[base.col_order]]
            ptr = np.searchsorted(base.cols[ids], np.arange(base.n + 1))
            other = base.rows[ids]
        else:
            raise ValueError(
                "'axis' has to be 'rows' or 'cols', not {!r}".format(axis))
        return ptr, other, base.values[ids]


def predict_entries(x, sigma, y, rows, cols):
    """``x_i^T diag(sigma) y_j`` for all pairs ``(rows[k], cols[k])``."""
    out = np.empty(len(rows))
    xs = x * sigma
    for start in range(0, len(rows), _CHUNK):
        sl = slice(start, start + _CHUNK)
        out[sl] = np.einsum('ij,ij->i', xs[rows[sl]], y[cols[sl]])
    return out


def project_residual(view, x, sigma, y):
    """Residual of the model ``x diag(sigma) y^T`` on the effective entries.

    Parameters
    ----------
    view : MaskedView or ObservedMatrix
        Entries on which the residual is evaluated.

    x : array_like, shape=(m, r)

    sigma : array_like, shape=(r,)

    y : array_like, shape=(n, r)

    Returns
    -------
    residual : Residual
        Per-entry residual values in entry-id order and their Frobenius
        norm.
    """
    if isinstance(view, ObservedMatrix):
        view = MaskedView(view)
    base = view.base
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2 or sigma.ndim != 1:
        raise ValueError("'x', 'y' have to be 2d and 'sigma' 1d")
    r = len(sigma)
    if x.shape != (base.m, r) or y.shape != (base.n, r):
        raise ValueError(
            'Factor shapes {} / {} / {} do not match a ({}, {}) matrix'.format(
                x.shape, sigma.shape, y.shape, base.m, base.n))
    ids = view.effective_ids
    rows = base.rows[ids]
    cols = base.cols[ids]
    values = base.values[ids] - predict_entries(x, sigma, y, rows, cols)
    norm = float(np.sqrt(np.dot(values, values)))
    return Residual(ids, rows, cols, values, norm, base.shape)
