"""Slow pointwise quadratures used to validate the FFT operators.

Both kernels are integrated in polar coordinates centred on their
singular points, which removes the ``1/|zeta - z|`` singularity of the
Cauchy kernel.  The Beurling kernel is handled by subtracting ``h(z0)``
and excising an ``eps``-disk, with Richardson extrapolation in ``eps``.
Integrands are callables that are smooth on the closed unit disk; the
source is taken to vanish outside it.
"""

from __future__ import annotations

import math

import numpy as np

from ..quadrature import DiskGrid, gauss_legendre


def _exit_radius(c, theta):
    """Distance from ``c`` (inside the disk) to the circle along ``theta``."""
    e = np.exp(1j * theta)
    b = np.real(np.conj(c) * e)
    return -b + np.sqrt(b * b + 1.0 - abs(c) ** 2)


def _centred_integral(fn, c, nrho=64, ntheta=256, rho0=0.0):
    """``int_{D, |zeta - c| > rho0} fn(zeta, rho, theta) rho drho dtheta``."""
    th = 2.0 * math.pi * (np.arange(ntheta) + 0.5) / ntheta
    R = _exit_radius(c, th)
    x, w = gauss_legendre(nrho, 0.0, 1.0)
    rho = rho0 + (R[None, :] - rho0) * x[:, None]
    wr = w[:, None] * (R[None, :] - rho0)
    zeta = c + rho * np.exp(1j * th[None, :])
    vals = fn(zeta, rho, th[None, :])
    return np.sum(vals * rho * wr) * (2.0 * math.pi / ntheta)


def _inv_integral(h, c, nrho, ntheta, grid):
    """``int_D h(zeta) / (zeta - c) dA``."""
    if abs(c) < 1.0 - 1e-12:
        return _centred_integral(
            lambda zeta, rho, th: h(zeta) * np.exp(-1j * th) / rho, c, nrho, ntheta)
    return grid.integrate(h(grid.z) / (grid.z - c))


def cauchy_oracle(h, z0, nrho=64, ntheta=256):
    """``P(h)(z0) = -1/pi int h (1/(zeta - z0) - 1/zeta)`` by quadrature.

    Points outside the disk should stay at distance ``>= 0.3`` from it.
    """
    grid = DiskGrid(nrho, ntheta)
    out = []
    for c in np.atleast_1d(np.asarray(z0, dtype=complex)):
        a = _inv_integral(h, complex(c), nrho, ntheta, grid)
        b = _inv_integral(h, 0j, nrho, ntheta, grid)
        out.append(-(a - b) / math.pi)
    return np.array(out)


def _pv_at(h, c, eps, nrho, ntheta):
    hc = h(np.array([c]))[0]

    def integrand(zeta, rho, th):
        return (h(zeta) - hc) * np.exp(-2j * th) / (rho * rho)

    smooth = _centred_integral(integrand, c, nrho, ntheta, rho0=eps)
    th = 2.0 * math.pi * (np.arange(ntheta) + 0.5) / ntheta
    # h(c) times the PV of e^{-2i theta}/rho over the region; log(eps) drops out
    ring = hc * np.sum(np.exp(-2j * th) * np.log(_exit_radius(c, th))) * (2.0 * math.pi / ntheta)
    return -(smooth + ring) / math.pi


def beurling_oracle(h, z0, eps=1e-3, nrho=64, ntheta=256):
    """Principal value ``-1/pi PV int h(zeta) / (zeta - z0)^2`` inside the disk.

    The excised-disk error is ``O(eps)`` for smooth ``h``; one Richardson
    step with ``eps`` and ``eps/2`` removes the leading term.
    """
    out = []
    for c in np.atleast_1d(np.asarray(z0, dtype=complex)):
        c = complex(c)
        a = _pv_at(h, c, eps, nrho, ntheta)
        b = _pv_at(h, c, 0.5 * eps, nrho, ntheta)
        out.append(2.0 * b - a)
    return np.array(out)
