'''Sparse outlier estimation by hard thresholding of the residual.'''
from ._outlier import SparseCorrection, OutlierPolicy
from ._outlier import threshold_global, threshold_rowcol


__all__ = ('SparseCorrection',
           'OutlierPolicy',
           'threshold_global',
           'threshold_rowcol')
