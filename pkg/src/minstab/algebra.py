"""Complex polynomials and finite Laurent tails.

Everything here is plain double precision coefficient arithmetic; the
objects are immutable so they can be shared freely.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .harmonic import HarmonicField


def _trim(c):
    c = np.array(c, dtype=complex).ravel()
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


class Polynomial:
    """``p(z) = sum_j a_j z^j`` with complex coefficients, lowest degree first.

    The stored coefficients are trimmed so the leading one is nonzero
    (the zero polynomial is ``[0]``).
    """

    __slots__ = ("_a",)

    def __init__(self, coeffs):
        a = _trim(coeffs)
        if not np.all(np.isfinite(a)):
            raise DomainError("polynomial coefficients must be finite")
        a.setflags(write=False)
        self._a = a

    @classmethod
    def monomial(cls, j, coef=1.0):
        c = np.zeros(j + 1, dtype=complex)
        c[j] = coef
        return cls(c)

    @property
    def coeffs(self):
        return self._a

    @property
    def degree(self):
        """Degree; the zero polynomial reports 0."""
        return self._a.size - 1

    def is_zero(self):
        return self._a.size == 1 and self._a[0] == 0

    def coeff(self, j):
        """``a_j`` with ``a_j = 0`` outside ``0..deg``."""
        if j < 0 or j >= self._a.size:
            return 0j
        return complex(self._a[j])

    def __call__(self, z):
        return poly_eval(self, z)

    def __add__(self, other):
        return poly_arith(self, other, "add")

    def __sub__(self, other):
        return poly_arith(self, poly_arith(other, None, "scale", -1.0), "add")

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return poly_arith(self, other, "mul")
        return poly_arith(self, None, "scale", other)

    __rmul__ = __mul__

    def __neg__(self):
        return poly_arith(self, None, "scale", -1.0)

    def __eq__(self, other):
        return isinstance(other, Polynomial) and np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash(self._a.tobytes())

    def allclose(self, other, atol=1e-12):
        n = max(self._a.size, other._a.size)
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[: self._a.size] = self._a
        b[: other._a.size] = other._a
        return bool(np.all(np.abs(a - b) <= atol))

    def to_json(self):
        """``[[re, im], ...]`` lowest degree first."""
        return [[float(c.real), float(c.imag)] for c in self._a]

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, list) or not data:
            raise DomainError("polynomial must be a non-empty list of [re, im] pairs")
        coeffs = []
        for pair in data:
            if isinstance(pair, (int, float)):
                coeffs.append(complex(pair))
                continue
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise DomainError(f"bad coefficient entry {pair!r}")
            coeffs.append(complex(float(pair[0]), float(pair[1])))
        return cls(coeffs)

    def __repr__(self):
        terms = ", ".join(f"{c:.6g}" for c in self._a)
        return f"Polynomial([{terms}])"


def poly_eval(p: Polynomial, z):
    """Horner evaluation; ``z`` may be a scalar or an array."""
    a = p.coeffs
    z = np.asarray(z, dtype=complex)
    acc = np.full(z.shape, a[-1], dtype=complex)
    for c in a[-2::-1]:
        acc = acc * z + c
    if acc.ndim == 0:
        return complex(acc)
    return acc


def poly_arith(p: Polynomial, q, op: str, factor=None) -> Polynomial:
    """Coefficient arithmetic: ``op`` is ``"add"``, ``"mul"`` or ``"scale"``.

    For ``scale`` the second polynomial is ignored and ``factor`` is the
    complex multiplier.
    """
    if op == "add":
        n = max(p.coeffs.size, q.coeffs.size)
        c = np.zeros(n, dtype=complex)
        c[: p.coeffs.size] += p.coeffs
        c[: q.coeffs.size] += q.coeffs
        return Polynomial(c)
    if op == "mul":
        return Polynomial(np.convolve(p.coeffs, q.coeffs))
    if op == "scale":
        return Polynomial(p.coeffs * complex(factor))
    raise DomainError(f"unknown polynomial operation {op!r}")


def poly_derivative(p: Polynomial) -> Polynomial:
    a = p.coeffs
    if a.size == 1:
        return Polynomial([0.0])
    return Polynomial(a[1:] * np.arange(1, a.size))


def poly_antiderivative(p: Polynomial) -> Polynomial:
    """Antiderivative normalised by ``A(0) = 0``."""
    a = p.coeffs
    c = np.zeros(a.size + 1, dtype=complex)
    c[1:] = a / np.arange(1, a.size + 1)
    return Polynomial(c)


def reparam_scale(p: Polynomial, r: float) -> Polynomial:
    """``q(z) = r p(r z)``, i.e. ``q_j = r^(j+1) a_j``.

    This is the holomorphic derivative of ``h(r .)`` when ``p`` is that
    of ``h``; it moves data on the disk of radius ``r`` to the unit disk.
    """
    r = float(r)
    if not r > 0 or not math.isfinite(r):
        raise DomainError(f"reparametrisation radius must be positive, got {r}")
    a = p.coeffs
    return Polynomial(a * r ** np.arange(1, a.size + 1))


class CircleModulus(NamedTuple):
    minimum: float
    lower_bound: float
    theta: float


def min_modulus_on_circle(p: Polynomial, samples: int = 2048) -> CircleModulus:
    """Sampled minimum of ``|p(e^{i theta})|`` with a certified lower bound.

    On the circle ``|d/dtheta p(e^{i theta})| <= sum_j j |a_j|``, and every
    angle lies within half a sample spacing of a sample, which gives the
    bound ``min_sampled - L * pi / samples``.
    """
    samples = int(samples)
    if samples < 4 * (p.degree + 1):
        raise DomainError(
            f"need at least {4 * (p.degree + 1)} samples for degree {p.degree}"
        )
    theta = 2.0 * np.pi * np.arange(samples) / samples
    vals = np.abs(poly_eval(p, np.exp(1j * theta)))
    i = int(np.argmin(vals))
    lip = float(np.sum(np.arange(p.coeffs.size) * np.abs(p.coeffs)))
    lower = max(0.0, float(vals[i]) - lip * np.pi / samples)
    return CircleModulus(float(vals[i]), lower, float(theta[i]))


class LaurentTail:
    """``phi(z) = sum_{m=1..M} gamma_m z^(-m)``, holomorphic off the closed disk.

    ``gammas[m - 1]`` holds ``gamma_m``; trailing zeros are trimmed.
    """

    __slots__ = ("_g",)

    def __init__(self, gammas):
        g = np.array(gammas, dtype=complex).ravel()
        nz = np.nonzero(g)[0]
        g = g[: nz[-1] + 1] if nz.size else np.zeros(0, dtype=complex)
        if not np.all(np.isfinite(g)):
            raise DomainError("Laurent coefficients must be finite")
        g.setflags(write=False)
        self._g = g

    @classmethod
    def monomial(cls, m: int, gamma=1.0):
        """``gamma z^(-m)``."""
        if m < 1:
            raise DomainError("Laurent tails start at z^-1")
        g = np.zeros(m, dtype=complex)
        g[m - 1] = gamma
        return cls(g)

    @property
    def gammas(self):
        return self._g

    @property
    def order(self):
        """Largest ``m`` with ``gamma_m != 0`` (0 for the zero tail)."""
        return self._g.size

    def is_zero(self):
        return self._g.size == 0

    def gamma(self, m):
        if m < 1 or m > self._g.size:
            return 0j
        return complex(self._g[m - 1])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self._g.size == 0:
            return np.zeros_like(z)
        w = 1.0 / z
        return w * np.polynomial.polynomial.polyval(w, self._g)

    def dz(self, z):
        z = np.asarray(z, dtype=complex)
        if self._g.size == 0:
            return np.zeros_like(z)
        w = 1.0 / z
        d = -self._g * np.arange(1, self._g.size + 1)
        return w * w * np.polynomial.polynomial.polyval(w, d)

    def __add__(self, other):
        n = max(self._g.size, other._g.size)
        g = np.zeros(n, dtype=complex)
        g[: self._g.size] += self._g
        g[: other._g.size] += other._g
        return LaurentTail(g)

    def scale(self, s):
        return LaurentTail(self._g * complex(s))

    def to_json(self):
        return [[float(c.real), float(c.imag)] for c in self._g]

    def __repr__(self):
        return f"LaurentTail({list(self._g)})"


def boundary_fourier(p: Polynomial, phi: LaurentTail) -> HarmonicField:
    """Fourier data of ``theta -> p(e^{i theta}) phi(e^{i theta})``.

    ``c_k = sum_m gamma_m a_{k+m}``; the returned field is the harmonic
    extension of that boundary function.
    """
    a = p.coeffs
    g = phi.gammas
    if g.size == 0:
        return HarmonicField([0.0])
    K = max(g.size, a.size - 1)
    c = np.zeros(2 * K + 1, dtype=complex)
    for m, gm in enumerate(g, start=1):
        if gm == 0:
            continue
        # a_j contributes to k = j - m
        c[K - m: K - m + a.size] += gm * a
    return HarmonicField(c)
