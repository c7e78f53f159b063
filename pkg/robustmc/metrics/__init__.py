'''Subspace angles, recovery errors and diagnostics.'''
from .angles import AngleReport, sin_theta
from .diagnostics import Theorem1Report, RecoveryReport
from .diagnostics import stable_rank, theorem1_check, recovery_error


__all__ = ('AngleReport',
           'sin_theta',
           'Theorem1Report',
           'RecoveryReport',
           'stable_rank',
           'theorem1_check',
           'recovery_error')
