'''Dense linear algebra kernels used by the alternating solver.'''
from ._dense import QrResult, SvdResult
from ._dense import as_matrix, check_orthonormal, qr_thin, svd_small
from ._dense import lsq_solve, truncated_svd
from ._dense import dense_svd, singular_values, spectral_norm


__all__ = ('QrResult',
           'SvdResult',
           'as_matrix',
           'check_orthonormal',
           'qr_thin',
           'svd_small',
           'lsq_solve',
           'truncated_svd',
           'dense_svd',
           'singular_values',
           'spectral_norm')
