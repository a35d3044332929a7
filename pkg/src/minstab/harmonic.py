"""Harmonic functions on the unit disk stored by their boundary Fourier data."""

from __future__ import annotations

import numpy as np


class HarmonicField:
    """Harmonic extension of a boundary trigonometric polynomial.

    The field is ``f(z) = sum_{k>=0} c_k z^k + sum_{k<0} c_k conj(z)^(-k)``,
    so on ``|z| = 1`` it restricts to ``sum_k c_k e^{ik theta}``.

    Parameters
    ----------
    coeffs : array_like of complex, length ``2K + 1``
        ``coeffs[k + K]`` is ``c_k`` for ``k = -K..K``.
    """

    __slots__ = ("_c", "K")

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex).ravel()
        if c.size % 2 == 0:
            raise ValueError("HarmonicField needs an odd number of coefficients")
        if not np.all(np.isfinite(c)):
            raise ValueError("HarmonicField coefficients must be finite")
        c.setflags(write=False)
        self._c = c
        self.K = (c.size - 1) // 2

    @classmethod
    def from_mapping(cls, mapping):
        """Build from ``{k: c_k}``; missing indices are zero."""
        if not mapping:
            return cls([0.0])
        K = max(abs(int(k)) for k in mapping)
        c = np.zeros(2 * K + 1, dtype=complex)
        for k, v in mapping.items():
            c[int(k) + K] += v
        return cls(c)

    @property
    def coeffs(self):
        return self._c

    def coeff(self, k):
        k = int(k)
        if abs(k) > self.K:
            return 0j
        return complex(self._c[k + self.K])

    def holomorphic_part(self):
        """Coefficients ``c_0..c_K``."""
        return self._c[self.K:]

    def antiholomorphic_part(self):
        """Coefficients ``c_{-1}..c_{-K}`` (index ``j`` holds ``c_{-(j+1)}``)."""
        return self._c[: self.K][::-1]

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        hol = np.polynomial.polynomial.polyval(z, self.holomorphic_part())
        anti = self.antiholomorphic_part()
        if anti.size == 0:
            return hol
        zb = np.conj(z)
        # sum_{k>=1} c_{-k} zb^k = zb * polyval(zb, [c_{-1}, c_{-2}, ...])
        return hol + zb * np.polynomial.polynomial.polyval(zb, anti)

    def dz(self, z):
        z = np.asarray(z, dtype=complex)
        hol = self.holomorphic_part()
        if hol.size <= 1:
            return np.zeros_like(z)
        d = hol[1:] * np.arange(1, hol.size)
        return np.polynomial.polynomial.polyval(z, d)

    def dzbar(self, z):
        z = np.asarray(z, dtype=complex)
        anti = self.antiholomorphic_part()
        if anti.size == 0:
            return np.zeros_like(z)
        d = anti * np.arange(1, anti.size + 1)
        return np.polynomial.polynomial.polyval(np.conj(z), d)

    def boundary(self, theta):
        """Values on the unit circle at angles ``theta``."""
        return self(np.exp(1j * np.asarray(theta, dtype=float)))

    def __add__(self, other):
        K = max(self.K, other.K)
        out = np.zeros(2 * K + 1, dtype=complex)
        out[K - self.K: K + self.K + 1] += self._c
        out[K - other.K: K + other.K + 1] += other._c
        return HarmonicField(out)

    def scale(self, s):
        return HarmonicField(self._c * s)

    def __repr__(self):
        return f"HarmonicField(K={self.K})"
