"""Polar quadrature on the unit disk and on small log-polar patches."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n, a=0.0, b=1.0):
    """Nodes and weights of the ``n``-point rule on ``[a, b]``."""
    x, w = _gauss_legendre(int(n))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


class DiskGrid:
    """Gauss-Legendre in the radius times the uniform rule in the angle.

    ``integrate`` computes ``int_D f dA`` for samples ``f`` shaped like
    ``z``.  The rule is exact for ``z^a conj(z)^b`` whenever
    ``a + b <= 2 nr - 1`` and ``a - b`` is not a nonzero multiple of
    ``ntheta``.
    """

    def __init__(self, nr=64, ntheta=256):
        self.nr = int(nr)
        self.ntheta = int(ntheta)
        r, wr = gauss_legendre(self.nr, 0.0, 1.0)
        th = 2.0 * math.pi * np.arange(self.ntheta) / self.ntheta
        self.r = r
        self.theta = th
        self.z = r[:, None] * np.exp(1j * th[None, :])
        self.weights = (wr * r)[:, None] * np.full(self.ntheta, 2.0 * math.pi / self.ntheta)[None, :]

    @property
    def shape(self):
        return self.z.shape

    def integrate(self, values):
        values = np.asarray(values)
        return np.sum(values * self.weights, axis=(-2, -1))

    def sample(self, fn):
        return fn(self.z)


class PolarPatch:
    """Quadrature on the disk ``|z - center| < rmax`` in log-radius.

    Radii run over ``[rmin, rmax]`` with Gauss-Legendre nodes in
    ``s = log(rho)``, so integrands that vary on every scale between
    ``rmin`` and ``rmax`` stay well resolved.  The region ``rho < rmin``
    is excluded; callers use this only where the integrand vanishes there.
    """

    def __init__(self, center, rmin, rmax, ns=160, ntheta=96):
        self.center = complex(center)
        self.rmin = float(rmin)
        self.rmax = float(rmax)
        s, ws = gauss_legendre(ns, math.log(self.rmin), math.log(self.rmax))
        rho = np.exp(s)
        th = 2.0 * math.pi * (np.arange(ntheta) + 0.5) / ntheta
        self.rho = rho
        self.z = self.center + rho[:, None] * np.exp(1j * th[None, :])
        # dA = rho d rho d theta = rho^2 ds d theta
        self.weights = (ws * rho * rho)[:, None] * np.full(ntheta, 2.0 * math.pi / ntheta)[None, :]

    def integrate(self, values):
        return np.sum(np.asarray(values) * self.weights, axis=(-2, -1))
