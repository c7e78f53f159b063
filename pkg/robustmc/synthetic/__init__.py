'''Synthetic robust matrix completion instances with known ground truth.
'''
from ._generate import InstanceSpec, GroundTruth
from ._generate import generate, incoherence, example_one, economy_svd
from ._generate import sub_stream, DENSE_CAP


__all__ = ('InstanceSpec',
           'GroundTruth',
           'generate',
           'incoherence',
           'example_one',
           'economy_svd',
           'sub_stream',
           'DENSE_CAP')
