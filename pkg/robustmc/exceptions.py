"""Exceptions and warnings shared by all subpackages."""


class NumericalFailure(RuntimeError):
    """A numerical kernel could not produce a usable result."""


class ConvergenceError(NumericalFailure):
    def __init__(self, message, n_iterations):
        super(ConvergenceError, self).__init__(
            '{} (after {} iterations)'.format(message, n_iterations))
        self.n_iterations = n_iterations


class ModelCollapsedError(NumericalFailure):
    """All singular values of the current factor vanished."""


class UnsupportedAtScaleError(ValueError):
    def __init__(self, what, size, cap):
        super(UnsupportedAtScaleError, self).__init__(
            '{} of size {} exceeds the cap {}'.format(
                what, size, cap))
        self.size = size
        self.cap = cap


class MatrixMarketError(ValueError):
    def __init__(self, message, path=None, lineno=None):
        location = ''
        if path is not None:
            location += '{}'.format(path)
        if lineno is not None:
            location += ':{}'.format(lineno)
        if location:
            message = '{}: {}'.format(location, message)
        super(MatrixMarketError, self).__init__(message)
        self.path = path
        self.lineno = lineno


class ThinRowWarning(UserWarning):
    """Rows (or columns) with too few usable observations for a stable solve.

    Attributes
    ----------
    axis : str
        ``'rows'`` when solving for X, ``'cols'`` when solving for Y.
    indices : numpy.intarray
        Affected row/column indices.
    counts : numpy.intarray
        Number of effective observations for each affected index.
    required : float
        The threshold ``min_row_obs_factor * rank`` they fell below.
    """
    def __init__(self, axis, indices, counts, required):
        super(ThinRowWarning, self).__init__(
            '{} {} have fewer than {:g} observations (min {}); using '
            'minimum-norm solutions'.format(
                len(indices), axis, required,
                int(min(counts)) if len(counts) else 0))
        self.axis = axis
        self.indices = indices
        self.counts = counts
        self.required = required
