"""Mutually infinitesimally equivalent Beltrami variations.

A variation is described by smooth functions ``g_i`` on the closed disk
that agree with a common Laurent tail ``phi`` on the unit circle and
share the value ``g_i(0)``.  Then ``mudot_i = (g_i)_zbar`` satisfies
``P(mudot_i) = g_i - g_i(0)`` inside the disk, the outside values of
``P(mudot_i)`` coincide for all ``i``, and ``T(mudot_i) = (g_i)_z``.

Two builders are provided.

``BlendedExtension``
    ``g_i = S(rho) phi + B(rho) q_i`` with smooth steps ``S`` and ``B``
    and random polynomials ``q_i`` in ``z, conj(z)`` vanishing at 0.  The
    resulting ``mudot_i`` are smooth and compactly supported, so they can
    be sampled on a :class:`PlaneGrid`.

``CutoffExtension``
    ``g_i = v_i c_i / p_i`` with ``v_i`` the harmonic extension of
    ``p_i phi`` and ``c_i`` a product of logarithmic cutoffs at the zeros
    of ``p_i`` in the disk.  Then ``p_i g_i`` is close to ``v_i`` in the
    energy norm, which transfers a negative ``F_alpha(phi)`` to the
    quadratic form.  The cutoffs live on scales far below any grid, so
    integrals use a composite polar rule instead.
"""

from __future__ import annotations

import math

import numpy as np

from ..algebra import LaurentTail, Polynomial, boundary_fourier
from ..errors import DomainError, Unsupported
from ..quadrature import DiskGrid, PolarPatch
from ..weierstrass import WeierstrassData


MAX_LAMBDA = 30.0


def smooth_step(s):
    """C-infinity step, 0 for ``s <= 0`` and 1 for ``s >= 1``; returns ``(S, S')``."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / s), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / (1.0 - s)), 0.0)
        S = a / (a + b)
        da = np.where(s > 0, a / (s * s), 0.0)
        db = np.where(s < 1, -b / ((1.0 - s) ** 2), 0.0)
        dS = (da * b - a * db) / ((a + b) ** 2)
    dS = np.where((s <= 0) | (s >= 1), 0.0, dS)
    return S, dS


def radial_step(rho, lo, hi):
    """``S((rho - lo)/(hi - lo))`` and its derivative in ``rho``."""
    S, dS = smooth_step((rho - lo) / (hi - lo))
    return S, dS / (hi - lo)


def _radial_dz(dF, z, rho):
    """``(F_z, F_zbar)`` for a radial ``F`` with derivative ``dF`` in ``rho``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        fz = np.where(rho > 0, dF * np.conj(z) / (2.0 * rho), 0.0)
        fzb = np.where(rho > 0, dF * z / (2.0 * rho), 0.0)
    return fz, fzb


class _ZZbarPoly:
    """``q(z, zbar) = sum c_ab z^a zbar^b`` with its Wirtinger derivatives."""

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=complex)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.polynomial.polynomial.polyval2d(z, np.conj(z), self.c)

    def dz(self, z):
        d = np.polynomial.polynomial.polyder(self.c, axis=0) if self.c.shape[0] > 1 else np.zeros((1, 1))
        return np.polynomial.polynomial.polyval2d(z, np.conj(z), d)

    def dzbar(self, z):
        d = np.polynomial.polynomial.polyder(self.c, axis=1) if self.c.shape[1] > 1 else np.zeros((1, 1))
        return np.polynomial.polynomial.polyval2d(z, np.conj(z), d)


class BlendedExtension:
    """Smooth compactly supported variations sharing the tail ``phi``.

    Parameters
    ----------
    phi : LaurentTail
        Common boundary values.
    qs : sequence of 2-D complex arrays
        ``qs[i][a, b]`` is the coefficient of ``z^a conj(z)^b`` in ``q_i``;
        the constant term is ignored so that ``g_i(0) = 0``.
    inner, outer : (float, float)
        Transition intervals of the tail step and the interior bump.
    """

    def __init__(self, phi: LaurentTail, qs, inner=(0.05, 0.45), outer=(0.45, 0.95)):
        if not 0 < inner[0] < inner[1] <= 1 or not 0 < outer[0] < outer[1] < 1:
            raise DomainError("blend intervals must lie inside (0, 1)")
        self.phi = phi
        self.qs = []
        for q in qs:
            q = np.array(q, dtype=complex, ndmin=2)
            q[0, 0] = 0.0
            self.qs.append(_ZZbarPoly(q))
        self.inner = inner
        self.outer = outer

    @property
    def n(self):
        return len(self.qs)

    def _parts(self, z):
        rho = np.abs(z)
        S, dS = radial_step(rho, *self.inner)
        B, dB = radial_step(rho, *self.outer)
        B, dB = 1.0 - B, -dB
        with np.errstate(divide="ignore", invalid="ignore"):
            zsafe = np.where(S > 0, z, 1.0)
            ph = np.where(S > 0, self.phi(zsafe), 0.0)
            dph = np.where(S > 0, self.phi.dz(zsafe), 0.0)
        return rho, S, dS, B, dB, ph, dph

    def g(self, i, z):
        z = np.asarray(z, dtype=complex)
        _, S, _, B, _, ph, _ = self._parts(z)
        return S * ph + B * self.qs[i](z)

    def dz(self, i, z):
        z = np.asarray(z, dtype=complex)
        rho, S, dS, B, dB, ph, dph = self._parts(z)
        Sz, _ = _radial_dz(dS, z, rho)
        Bz, _ = _radial_dz(dB, z, rho)
        q = self.qs[i]
        return Sz * ph + S * dph + Bz * q(z) + B * q.dz(z)

    def dzbar(self, i, z):
        """The Beltrami variation ``mudot_i``; zero outside ``|z| < outer[1]``."""
        z = np.asarray(z, dtype=complex)
        rho, S, dS, B, dB, ph, _ = self._parts(z)
        _, Szb = _radial_dz(dS, z, rho)
        _, Bzb = _radial_dz(dB, z, rho)
        q = self.qs[i]
        out = Szb * ph + Bzb * q(z) + B * q.dzbar(z)
        return np.where(rho < 1.0, out, 0.0)

    mudot = dzbar

    def derivatives(self, i, z):
        return self.dz(i, z), self.dzbar(i, z)

    def scaled(self, s):
        return BlendedExtension(self.phi.scale(s), [q.c * s for q in self.qs], self.inner, self.outer)

    def sup_mudot(self, grid=None):
        """``max_i sup |mudot_i|`` on a fine polar sample."""
        grid = DiskGrid(96, 384) if grid is None else grid
        return max(float(np.max(np.abs(self.dzbar(i, grid.z)))) for i in range(self.n))

    def normalized(self, sup=1.0):
        """Copy scaled so that ``max_i sup |mudot_i| = sup``."""
        m = self.sup_mudot()
        return self.scaled(sup / m) if m > 0 else self

    @classmethod
    def random(cls, rng, n, phi=None, order=2, degree=3, scale=1.0, equal=False):
        """Random tail (unless given) and random interior polynomials.

        ``equal=True`` uses one interior polynomial for every coordinate.
        """
        if phi is None:
            gam = rng.normal(size=order) + 1j * rng.normal(size=order)
            phi = LaurentTail(gam / np.arange(1, order + 1))
        qs = []
        base = None
        for _ in range(n):
            c = rng.normal(size=(degree + 1, degree + 1)) + 1j * rng.normal(size=(degree + 1, degree + 1))
            a, b = np.indices(c.shape)
            c = np.where(a + b <= degree, c, 0.0) / (1.0 + a + b) ** 2 * scale
            if equal:
                base = c if base is None else base
                c = base
            qs.append(c)
        return cls(phi.scale(scale) if scale != 1.0 else phi, qs)


def _distinct_roots(p: Polynomial, tol=1e-8):
    if p.degree < 1:
        return []
    roots = np.roots(p.coeffs[::-1])
    out = []
    for a in roots:
        if all(abs(a - b) > tol for b in out):
            out.append(complex(a))
    return out


class CutoffExtension:
    """``g_i = v_i c_i / p_i - g_i(0) beta`` with logarithmic cutoffs ``c_i``.

    Each zero ``a`` of ``p_i`` in the disk gets ``psi = S(log(R/rho)/Lambda)``,
    equal to one for ``rho < R e^{-Lambda}`` and zero for ``rho > R``.  The
    Dirichlet cost of such a cutoff is ``O(1/Lambda)``.  When ``p_i(0) != 0``
    the value ``g_i(0)`` is removed with a radial bump ``beta`` about 0 so
    that all ``g_i`` vanish at the origin.

    Parameters
    ----------
    W : WeierstrassData
    phi : LaurentTail
    Lambda : float
        Logarithmic width of the cutoffs.  Inner radii are ``R e^{-Lambda}``;
        beyond ``Lambda = 30`` the normalising integral at the origin
        loses its cancellation to rounding.
    """

    def __init__(self, W: WeierstrassData, phi: LaurentTail, Lambda=20.0):
        if phi.is_zero():
            raise DomainError("cutoff extension needs a nonzero tail")
        if not 1.0 <= Lambda <= MAX_LAMBDA:
            raise DomainError(f"Lambda must lie in [1, {MAX_LAMBDA}]")
        self.W = W
        self.phi = phi
        self.Lambda = float(Lambda)
        self.v = [boundary_fourier(p, phi) for p in W.polys]
        self.cuts = []
        self.beta = []
        for i, p in enumerate(W.polys):
            if p.is_zero():
                raise Unsupported(f"coordinate {i + 1} vanishes identically")
            zs = [a for a in _distinct_roots(p) if abs(a) < 1.0]
            cuts = []
            for a in zs:
                others = [abs(a - b) for b in zs if b != a]
                R = min(0.1, (1.0 - abs(a)) / 3.0, min(others, default=1.0) / 5.0)
                cuts.append((a, R))
            self.cuts.append(cuts)
            self.beta.append(None)
        self._taylor = {}
        # a common value g_i(0) = 0
        for i, p in enumerate(W.polys):
            p0 = p(np.array([0j]))[0]
            if abs(p0) == 0:
                continue
            g0 = complex(self._raw(i, np.array([0j]))[1][0])
            if g0 == 0:
                continue
            clear = min((abs(a) - 2 * R for a, R in self.cuts[i]), default=1.0)
            b = min(0.5, 0.9 * clear)
            if b < 0.02:
                raise Unsupported("zeros of p_i crowd the origin; cannot recentre the extension")
            self.beta[i] = (g0, b)

    @property
    def n(self):
        return self.W.n

    def _cutoff(self, i, z, local=None):
        c = np.ones(z.shape)
        cz = np.zeros(z.shape, dtype=complex)
        czb = np.zeros(z.shape, dtype=complex)
        for j, (a, R) in enumerate(self.cuts[i]):
            w = local[1] if local is not None and local[0] == j else z - a
            rho = np.abs(w)
            with np.errstate(divide="ignore"):
                s = np.log(R / np.maximum(rho, 1e-300)) / self.Lambda
            psi, dpsi = smooth_step(s)
            with np.errstate(divide="ignore", invalid="ignore"):
                k = np.where(rho > 0, -dpsi / (2.0 * self.Lambda * rho * rho), 0.0)
            # d(1 - psi) = -dpsi
            pz = k * np.conj(w)
            pzb = k * w
            one = 1.0 - psi
            cz = cz * one - c * pz
            czb = czb * one - c * pzb
            c = c * one
        return c, cz, czb

    def _shifted(self, i, j):
        """Coefficients of ``w -> p_i(a_j + w)`` with the constant term set to 0.

        Near a zero ``p_i(z)`` falls far below the rounding error of
        ``z``; the computed root is treated as exact.
        """
        key = (i, j)
        if key not in self._taylor:
            a = self.cuts[i][j][0]
            q = np.polynomial.Polynomial(self.W.polys[i].coeffs)(np.polynomial.Polynomial([a, 1.0]))
            c = np.array(q.coef, dtype=complex)
            c[0] = 0.0
            self._taylor[key] = (c, c[1:] * np.arange(1, c.size))
        return self._taylor[key]

    def _poly(self, i, z, local=None):
        if local is not None:
            c, dc = self._shifted(i, local[0])
            w = local[1]
            return np.polynomial.polynomial.polyval(w, c), np.polynomial.polynomial.polyval(w, dc)
        p = self.W.polys[i]
        dc = p.coeffs[1:] * np.arange(1, p.coeffs.size)
        P = p(z)
        dP = np.polynomial.polynomial.polyval(z, dc) if dc.size else np.zeros_like(P)
        return P, dP

    def _raw(self, i, z, local=None):
        """``p``, and ``v c / p`` with its derivatives (zero where ``c`` vanishes)."""
        v = self.v[i]
        c, cz, czb = self._cutoff(i, z, local)
        P, dP = self._poly(i, z, local)
        V, Vz, Vzb = v(z), v.dz(z), v.dzbar(z)
        live = c > 0
        Ps = np.where(live, P, 1.0)
        g = np.where(live, V * c / Ps, 0.0)
        gz = np.where(live, (Vz * c + V * cz) / Ps - V * c * dP / (Ps * Ps), 0.0)
        gzb = np.where(live, (Vzb * c + V * czb) / Ps, 0.0)
        return P, g, gz, gzb

    def values(self, i, z, local=None):
        """``(p_i, g_i, (g_i)_z, (g_i)_zbar)`` at ``z``.

        ``local = (j, w)`` declares ``z = a_j + w`` exactly, for nodes of
        the patch around the ``j``-th zero.
        """
        z = np.asarray(z, dtype=complex)
        P, g, gz, gzb = self._raw(i, z, local)
        if self.beta[i] is not None:
            g0, b = self.beta[i]
            rho = np.abs(z)
            B, dB = radial_step(rho, 0.5 * b, b)
            Bz, Bzb = _radial_dz(-dB, z, rho)
            g = g - g0 * (1.0 - B)
            gz = gz - g0 * Bz
            gzb = gzb - g0 * Bzb
        return P, g, gz, gzb

    def g(self, i, z):
        return self.values(i, z)[1]

    def dz(self, i, z):
        return self.values(i, z)[2]

    def dzbar(self, i, z):
        return self.values(i, z)[3]

    mudot = dzbar

    def derivatives(self, i, z):
        return self.values(i, z)[2:]

    def blocks(self, i, nr=192, ntheta=1024, ns=200, npatch=128):
        """Composite rule for ``int_D``, adapted to coordinate ``i``.

        A smooth partition ``chi_j`` (one near each cutoff centre, zero
        beyond twice its radius) splits the disk; the global polar grid
        carries ``1 - sum chi_j`` and a log-polar patch carries each
        ``chi_j``, starting where the cutoff makes the integrands vanish.
        Yields ``(z, weights, local)`` with ``local`` as in :meth:`values`;
        patch arrays keep their (radius, angle) shape.
        """
        grid = DiskGrid(nr, ntheta)
        z0 = grid.z
        w0 = grid.weights.copy()
        for a, R in self.cuts[i]:
            w0 = w0 * radial_step(np.abs(z0 - a), R, 2.0 * R)[0]
        yield z0, w0, None
        for j, (a, R) in enumerate(self.cuts[i]):
            patch = PolarPatch(0.0, R * math.exp(-self.Lambda), 2.0 * R, ns=ns, ntheta=npatch)
            w = patch.z
            chi = 1.0 - radial_step(np.abs(w), R, 2.0 * R)[0]
            yield a + w, patch.weights * chi, (j, w)
