'''Canonical angles between subspaces.'''
from dataclasses import dataclass

import numpy as np

from ..linalg import check_orthonormal, svd_small


@dataclass
class AngleReport:
    """Canonical angles between two k-dimensional subspaces.

    Attributes
    ----------
    theta_max : float
        Largest canonical angle in radians, in [0, pi/2].

    sines : numpy.array, shape=(k,)
        Sines of all canonical angles, nonincreasing.
    """
    theta_max: float
    sines: np.ndarray

    @property
    def norm(self):
        """Spectral norm ``||sin Theta||``."""
        return float(self.sines[0]) if len(self.sines) else 0.

    @property
    def frobenius(self):
        return float(np.sqrt(np.dot(self.sines, self.sines)))


def sin_theta(u, v):
    """Canonical angles between ``span(u)`` and ``span(v)``.

    With ``omega_j`` the singular values of ``u^T v`` the angles are
    ``arccos(omega_j)``; the sines are computed as ``sqrt(1 - omega_j^2)``
    clamped to [0, 1].

    Parameters
    ----------
    u, v : array_like, shape=(n, k)
        Matrices with orthonormal columns (checked to 1e-8).

    Returns
    -------
    report : AngleReport
    """
    u = check_orthonormal(u, name='u')
    v = check_orthonormal(v, name='v')
    if u.shape != v.shape:
        raise ValueError('Shapes of u and v differ: {} != {}'.format(
            u.shape, v.shape))
    omega = np.clip(svd_small(np.dot(u.T, v)).sigma, 0., 1.)
    # omega is nonincreasing, so the sines are nondecreasing
    sines = np.sqrt(np.clip(1. - omega * omega, 0., 1.))[::-1]
    theta_max = float(np.arccos(omega[-1]))
    return AngleReport(theta_max=theta_max, sines=sines.copy())
