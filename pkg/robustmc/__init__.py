from . import linalg
from . import observation
from . import outlier
from . import solution
from . import synthetic
from . import metrics
from . import pipeline

__version__ = '0.1.0'

__all__ = ('linalg',
           'observation',
           'outlier',
           'solution',
           'synthetic',
           'metrics',
           'pipeline')
