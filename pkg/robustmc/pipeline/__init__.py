'''Experiment sweeps over generated instances.
'''
from ._pipeline import default_sparsity, sample_rate, SweepRecord
from ._pipeline import observation_rate_sweep, matrix_size_sweep


__all__ = ('default_sparsity',
           'sample_rate',
           'SweepRecord',
           'observation_rate_sweep',
           'matrix_size_sweep')
