"""Periodic plane grid and the Fourier-multiplier operators P and T.

Sources live in the unit disk.  ``cauchy_P`` convolves with the Cauchy
kernel ``1 / (pi z)`` truncated at radius ``R = L/2``; the truncated
kernel has the closed-form transform

    -2i (1 - J0(|k| R)) / (kx + i ky),

so the periodic FFT convolution equals the free-space one on
``|z| <= L/2 - 1`` (no wrap-around reaches those points).  Values further
out are not meaningful.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import j0

from ..errors import DomainError

SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class PlaneGrid:
    L: float = 8.0
    N: int = 256

    def __post_init__(self):
        if self.L < 8.0:
            raise DomainError("plane grid side must be at least 8")
        if self.N % 2:
            raise DomainError("plane grid resolution must be even")

    @property
    def h(self):
        return self.L / self.N

    @property
    def valid_radius(self):
        """Radius inside which transforms of disk-supported data are exact."""
        return 0.5 * self.L - 1.0

    @cached_property
    def x(self):
        return -0.5 * self.L + self.h * np.arange(self.N)

    @cached_property
    def z(self):
        X, Y = np.meshgrid(self.x, self.x, indexing="xy")
        return X + 1j * Y

    @cached_property
    def origin(self):
        c = self.N // 2
        return (c, c)

    @cached_property
    def _k(self):
        k = 2.0 * math.pi * np.fft.fftfreq(self.N, d=self.h)
        KX, KY = np.meshgrid(k, k, indexing="xy")
        return KX, KY

    @cached_property
    def dz_symbol(self):
        KX, KY = self._k
        return 0.5j * (KX - 1j * KY)

    @cached_property
    def dzbar_symbol(self):
        KX, KY = self._k
        return 0.5j * (KX + 1j * KY)

    @cached_property
    def cauchy_symbol(self):
        KX, KY = self._k
        kappa = KX + 1j * KY
        kabs = np.abs(kappa)
        R = 0.5 * self.L
        out = np.zeros_like(kappa)
        nz = kabs > 0
        out[nz] = -2j * (1.0 - j0(kabs[nz] * R)) / kappa[nz]
        return out

    @cached_property
    def disk_mask(self):
        return np.abs(self.z) < 1.0

    @property
    def cell_area(self):
        return self.h * self.h

    def sample(self, fn, inside_only=True):
        """Evaluate ``fn`` on the grid, zero outside the open unit disk."""
        vals = np.zeros(self.z.shape, dtype=complex)
        m = self.disk_mask if inside_only else np.ones(self.z.shape, bool)
        vals[m] = fn(self.z[m])
        return vals

    def integrate(self, values, region=None):
        """Trapezoid sum over the grid (or a boolean ``region``)."""
        values = np.asarray(values)
        if region is not None:
            values = np.where(region, values, 0.0)
        return np.sum(values) * self.cell_area

    def dz(self, u):
        return np.fft.ifft2(self.dz_symbol * np.fft.fft2(u))

    def dzbar(self, u):
        return np.fft.ifft2(self.dzbar_symbol * np.fft.fft2(u))

    def index_of(self, z):
        """Nearest grid indices ``(row, col)`` for points ``z``."""
        z = np.asarray(z, dtype=complex)
        col = np.rint((z.real + 0.5 * self.L) / self.h).astype(int)
        row = np.rint((z.imag + 0.5 * self.L) / self.h).astype(int)
        return row, col


def check_support(grid: PlaneGrid, h, tol=SUPPORT_TOL):
    h = np.asarray(h)
    if h.shape != grid.z.shape:
        raise DomainError(f"field shape {h.shape} does not match grid {grid.z.shape}")
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    outside = np.abs(h[~grid.disk_mask])
    if outside.size and float(np.max(outside)) > tol * scale:
        raise DomainError("field is not supported in the unit disk")


def cauchy_P(grid: PlaneGrid, h, check=True):
    """Solve ``u_zbar = h`` with decay at infinity, normalised by ``u(0) = 0``.

    This is ``P(h)(z) = -1/pi int h(zeta) (1/(zeta - z) - 1/zeta)``.
    """
    if check:
        check_support(grid, h)
    u = np.fft.ifft2(grid.cauchy_symbol * np.fft.fft2(h))
    return u - u[grid.origin]


def beurling_T(grid: PlaneGrid, h, check=True):
    """Beurling transform as the z-derivative of ``cauchy_P``."""
    if check:
        check_support(grid, h)
    return np.fft.ifft2(grid.dz_symbol * grid.cauchy_symbol * np.fft.fft2(h))


def beurling_multiplier(grid: PlaneGrid, h):
    """Same operator written as the multiplier ``conj(k)/k (1 - J0(|k| R))``.

    Used to cross-check ``beurling_T``; algebraically the two agree.
    """
    KX, KY = grid._k
    kappa = KX + 1j * KY
    kabs = np.abs(kappa)
    sym = np.zeros_like(kappa)
    nz = kabs > 0
    sym[nz] = np.conj(kappa[nz]) / kappa[nz] * (1.0 - j0(kabs[nz] * 0.5 * grid.L))
    return np.fft.ifft2(sym * np.fft.fft2(h))


def fd_dz_dzbar(grid: PlaneGrid, u):
    """Fourth-order central differences for ``u_z`` and ``u_zbar``.

    Rows index ``y`` and columns index ``x`` (``meshgrid`` "xy" order).
    Periodic wrap at the box edge is harmless for the interior use here.
    """
    h = grid.h

    def d(ax):
        return (
            -np.roll(u, -2, axis=ax) + 8.0 * np.roll(u, -1, axis=ax)
            - 8.0 * np.roll(u, 1, axis=ax) + np.roll(u, 2, axis=ax)
        ) / (12.0 * h)

    ux = d(1)
    uy = d(0)
    return 0.5 * (ux - 1j * uy), 0.5 * (ux + 1j * uy)


# -- binary field files --------------------------------------------------

def write_field(path, grid: PlaneGrid, values, support="disk"):
    """JSON header line, then little-endian float64 interleaved (re, im)."""
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != grid.z.shape:
        raise DomainError("field shape does not match grid")
    header = json.dumps({"L": grid.L, "N": grid.N, "support": support}, sort_keys=True)
    inter = np.empty(values.size * 2, dtype="<f8")
    inter[0::2] = values.real.ravel()
    inter[1::2] = values.imag.ravel()
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8") + b"\n")
        fh.write(inter.tobytes())


def read_field(path):
    """Inverse of :func:`write_field`; returns ``(grid, values, header)``."""
    with open(path, "rb") as fh:
        line = fh.readline()
        try:
            header = json.loads(line.decode("utf-8"))
            grid = PlaneGrid(float(header["L"]), int(header["N"]))
        except (ValueError, KeyError, UnicodeDecodeError) as exc:
            raise DomainError(f"bad field header in {path}: {exc}") from None
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != 2 * grid.N * grid.N:
        raise DomainError(f"field file {path} has {data.size} values, expected {2 * grid.N ** 2}")
    vals = (data[0::2] + 1j * data[1::2]).reshape(grid.N, grid.N)
    return grid, vals, header
