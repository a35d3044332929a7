"""Disk integrals: the functional F, Reich-Strebel deltas and the finite inequality.

Hopf differentials are taken as ``phi_i = p_i^2`` (the square of
``(h_i)_z`` for ``h_i = 2 Re A_i``).  A global positive factor on every
``phi_i`` scales both sides of each inequality alike.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NotQuasiconformal
from ..harmonic import HarmonicField
from ..quadrature import DiskGrid
from ..weierstrass import WeierstrassData
from .plane import PlaneGrid
from .variations import radial_step


def holds_tolerance(lhs, rhs):
    return 1e-7 * (1.0 + abs(lhs) + abs(rhs))


@dataclass(frozen=True)
class InequalityResult:
    lhs: float
    rhs: float
    holds: bool
    residuals: dict = None

    def to_json(self):
        return {
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "holds": bool(self.holds),
            "residuals": {k: float(v) for k, v in (self.residuals or {}).items()},
        }


def disk_integral(grid, values):
    """``int_D values dA`` on a :class:`DiskGrid` or a :class:`PlaneGrid`."""
    if isinstance(grid, PlaneGrid):
        return grid.integrate(values, region=grid.disk_mask)
    return grid.integrate(values)


def F_quadrature(fz, fzbar, grid: DiskGrid) -> float:
    """``Re int f_z f_zbar + int |f_zbar|^2`` from sampled derivatives."""
    fz = np.asarray(fz)
    fzbar = np.asarray(fzbar)
    return float(np.real(disk_integral(grid, fz * fzbar)) + disk_integral(grid, np.abs(fzbar) ** 2).real)


def F_field(f: HarmonicField, grid: DiskGrid | None = None) -> float:
    """:func:`F_quadrature` with derivatives of ``f`` taken term by term."""
    grid = DiskGrid() if grid is None else grid
    return F_quadrature(f.dz(grid.z), f.dzbar(grid.z), grid)


def hopf(W: WeierstrassData, i, z):
    p = W.polys[i]
    return p(z) ** 2


def _check_qc(mu):
    m = float(np.max(np.abs(mu))) if np.size(mu) else 0.0
    if not m < 1.0:
        raise NotQuasiconformal(f"||mu||_inf = {m:.6g} is not below 1")
    return m


def reich_strebel_delta(W: WeierstrassData, i, mu, grid) -> float:
    """``-4 Re int phi_i mu/(1-|mu|^2) + 4 int |phi_i| |mu|^2/(1-|mu|^2)``.

    ``mu`` is sampled on ``grid`` (a :class:`DiskGrid` or a
    :class:`PlaneGrid`; for the latter only the disk counts).
    """
    mu = np.asarray(mu)
    _check_qc(mu)
    phi = hopf(W, i, grid.z)
    d = 1.0 - np.abs(mu) ** 2
    a = disk_integral(grid, phi * mu / d)
    b = disk_integral(grid, np.abs(phi) * np.abs(mu) ** 2 / d)
    return float(-4.0 * np.real(a) + 4.0 * np.real(b))


def nmi_finite_check(W: WeierstrassData, mus, grid) -> InequalityResult:
    """Finite inequality ``Re sum int phi_i mu_i/(1-|mu_i|^2) <= sum int |phi_i||mu_i|^2/(1-|mu_i|^2)``."""
    if len(mus) != W.n:
        raise ValueError(f"need {W.n} Beltrami fields, got {len(mus)}")
    lhs = 0.0
    rhs = 0.0
    for i, mu in enumerate(mus):
        mu = np.asarray(mu)
        _check_qc(mu)
        phi = hopf(W, i, grid.z)
        d = 1.0 - np.abs(mu) ** 2
        lhs += float(np.real(disk_integral(grid, phi * mu / d)))
        rhs += float(np.real(disk_integral(grid, np.abs(phi) * np.abs(mu) ** 2 / d)))
    return InequalityResult(lhs, rhs, lhs <= rhs + holds_tolerance(lhs, rhs))


def random_beltrami(rng, grid, bound=0.9, degree=3):
    """Random smooth ``mu`` on ``grid`` with ``||mu||_inf = bound * U(0, 1)``."""
    c = rng.normal(size=(degree + 1, degree + 1)) + 1j * rng.normal(size=(degree + 1, degree + 1))
    z = grid.z
    mu = np.polynomial.polynomial.polyval2d(z, np.conj(z), c)
    if isinstance(grid, PlaneGrid):
        mu = np.where(grid.disk_mask, mu, 0.0)
    m = float(np.max(np.abs(mu)))
    return mu * (bound * rng.uniform() / m if m > 0 else 0.0)


def random_compact_beltrami(rng, grid, bound=0.2, degree=3, support=(0.3, 0.9)):
    """Smooth ``mu`` vanishing for ``|z| >= support[1]``, ``||mu||_inf = bound``."""
    c = rng.normal(size=(degree + 1, degree + 1)) + 1j * rng.normal(size=(degree + 1, degree + 1))
    z = grid.z
    B = 1.0 - radial_step(np.abs(z), *support)[0]
    mu = B * np.polynomial.polynomial.polyval2d(z, np.conj(z), c)
    m = float(np.max(np.abs(mu)))
    return mu * (bound / m) if m > 0 else mu
