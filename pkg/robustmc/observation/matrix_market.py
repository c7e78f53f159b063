'''Matrix Market "coordinate real general" files for observation stores.

Indices are 1-based on disk and 0-based in memory. Values are written with
17 significant digits so that a write/read round trip is bit-exact.

The reader checks the header and every entry line and reports the offending
line number. For lenient reading without those checks ``scipy.io.mmread``
loads the same files into a ``coo_matrix``.
'''
import numpy as np
from scipy.io import mminfo

from ._observed import ObservedMatrix
from ..exceptions import MatrixMarketError


HEADER = '%%MatrixMarket matrix coordinate real general'


def write_matrix_market(obs, path, comment=None):
    """Writes ``obs`` as a Matrix Market coordinate file.

    Parameters
    ----------
    obs : ObservedMatrix
        Observation store to write.

    path : str
        Destination file.

    comment : None or str, optional
        Written as ``%`` comment lines below the header.
    """
    lines = [HEADER]
    if comment:
        lines.extend('% {}'.format(line) for line in comment.splitlines())
    lines.append('{} {} {}'.format(obs.m, obs.n, obs.n_entries))
    lines.extend('{} {} {}'.format(i + 1, j + 1, format(v, '.17g'))
                 for i, j, v in zip(obs.rows.tolist(),
                                    obs.cols.tolist(),
                                    obs.values.tolist()))
    with open(path, 'w') as f:
        f.write('\n'.join(lines))
        f.write('\n')


def read_matrix_market(path):
    """Reads a Matrix Market coordinate file into an ObservedMatrix.

    Raises
    ------
    MatrixMarketError
        For malformed headers, non-coordinate or non-real formats, malformed
        entry lines and out of bounds indices. The error carries the line
        number.
    """
    try:
        m, n, n_entries, fmt, field, symmetry = mminfo(path)
    except (ValueError, IndexError, RuntimeError) as e:
        raise MatrixMarketError('malformed header ({})'.format(e),
                                path=path,
                                lineno=1)
    if fmt != 'coordinate':
        raise MatrixMarketError(
            "format '{}' is not supported, only 'coordinate'".format(fmt),
            path=path, lineno=1)
    if field not in ('real', 'integer') or symmetry != 'general':
        raise MatrixMarketError(
            "only 'real general' matrices are supported, got '{} {}'".format(
                field, symmetry),
            path=path, lineno=1)

    rows = np.empty(n_entries, dtype=np.int64)
    cols = np.empty(n_entries, dtype=np.int64)
    values = np.empty(n_entries, dtype=np.float64)
    pointer = 0
    seen_size = False
    lineno = 0
    with open(path, 'r') as f:
        for lineno, line in enumerate(f, start=1):
            stripped = line.strip()
            if lineno == 1 or not stripped or stripped.startswith('%'):
                continue
            if not seen_size:
                seen_size = True
                continue
            tokens = stripped.split()
            if len(tokens) != 3:
                raise MatrixMarketError(
                    'expected "row col value", got {!r}'.format(stripped),
                    path=path, lineno=lineno)
            try:
                i = int(tokens[0])
                j = int(tokens[1])
                v = float(tokens[2])
            except ValueError:
                raise MatrixMarketError(
                    'cannot parse entry {!r}'.format(stripped),
                    path=path, lineno=lineno)
            if not (1 <= i <= m and 1 <= j <= n):
                raise MatrixMarketError(
                    'entry ({}, {}) out of bounds for a {}x{} matrix'.format(
                        i, j, m, n),
                    path=path, lineno=lineno)
            if pointer >= n_entries:
                raise MatrixMarketError(
                    'more entries than the declared {}'.format(n_entries),
                    path=path, lineno=lineno)
            rows[pointer] = i - 1
            cols[pointer] = j - 1
            values[pointer] = v
            pointer += 1
    if pointer != n_entries:
        raise MatrixMarketError(
            'found {} entries, header declares {}'.format(pointer, n_entries),
            path=path, lineno=lineno)
    try:
        return ObservedMatrix.from_arrays(m, n, rows, cols, values)
    except ValueError as e:
        raise MatrixMarketError(str(e), path=path)
