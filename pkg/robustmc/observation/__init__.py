'''The observation model: the observed entries of M, masked views that
leave out the current outlier estimate, and Matrix Market files.
'''
from ._observed import ObservedMatrix, MaskedView, Residual
from ._observed import project_residual, predict_entries
from .matrix_market import read_matrix_market, write_matrix_market


__all__ = ('ObservedMatrix',
           'MaskedView',
           'Residual',
           'project_residual',
           'predict_entries',
           'read_matrix_market',
           'write_matrix_market')
