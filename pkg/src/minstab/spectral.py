"""Closed-form second-variation functionals on harmonic extensions.

For ``f = sum_{k>=0} c_k z^k + sum_{k>0} c_{-k} conj(z)^k`` term-by-term
differentiation and orthogonality of ``z^a conj(z)^b`` on circles give

    F(f) = Re int f_z f_zbar + int |f_zbar|^2
         = pi * sum_{k>=1} k * (Re(c_k c_{-k}) + |c_{-k}|^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import LaurentTail, Polynomial, boundary_fourier
from .errors import DomainError
from .harmonic import HarmonicField
from .weierstrass import WeierstrassData

__all__ = [
    "HarmonicField",
    "F_spectral",
    "C_printed",
    "C_canonical",
    "F_alpha",
    "destab_search_single_m",
    "gram_index",
    "QuadraticFormReport",
]


def F_spectral(f: HarmonicField) -> float:
    K = f.K
    if K == 0:
        return 0.0
    k = np.arange(1, K + 1)
    cp = f.coeffs[K + 1:]
    cm = f.coeffs[:K][::-1]
    return math.pi * float(np.sum(k * (np.real(cp * cm) + np.abs(cm) ** 2)))


def C_printed(p: Polynomial, gamma, m: int) -> float:
    """The displayed closed form, weights ``1/(m - j)``, kept verbatim."""
    if m < 0:
        raise DomainError("m must be >= 0")
    g = complex(gamma)
    total = 0.0
    for j in range(m):
        aj = p.coeff(j)
        total += ((g * g * aj * p.coeff(2 * m - j)).real + abs(g) ** 2 * abs(aj) ** 2) / (m - j)
    return math.pi * total


def C_canonical(p: Polynomial, gamma, m: int) -> float:
    """``F`` of the harmonic extension of ``p * gamma z^-m`` on the circle.

    Equals ``pi sum_{j<m} (m - j)(Re(gamma^2 a_j a_{2m-j}) + |gamma|^2 |a_j|^2)``;
    it agrees with :func:`C_printed` when ``m = 1``.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    return F_spectral(boundary_fourier(p, LaurentTail.monomial(m, gamma)))


def F_alpha(W: WeierstrassData, phi: LaurentTail) -> float:
    """``sum_i F(v_i)`` with ``v_i`` the extension of ``p_i phi`` from the circle.

    A negative value means ``phi`` destabilises the surface.
    """
    if phi.is_zero():
        return 0.0
    return float(sum(F_spectral(boundary_fourier(p, phi)) for p in W.polys))


def _polarize_2x2(fn):
    """Symmetric M with ``fn(x + iy) = [x y] M [x y]^T``."""
    a = fn(1.0)
    b = fn(1j)
    c = fn((1.0 + 1.0j) / math.sqrt(2.0))
    off = c - 0.5 * (a + b)
    return np.array([[a, off], [off, b]])


def destab_search_single_m(W: WeierstrassData, m: int):
    """Most negative direction of ``gamma -> F_alpha(gamma z^-m)`` on ``|gamma| = 1``.

    Returns ``(min_eigenvalue, gamma_star, matrix)``.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    M = _polarize_2x2(lambda g: F_alpha(W, LaurentTail.monomial(m, g)))
    w, v = np.linalg.eigh(M)
    x, y = v[:, 0]
    # fix the sign so the result is reproducible
    if x < 0 or (x == 0 and y < 0):
        x, y = -x, -y
    return float(w[0]), complex(x, y), M


@dataclass
class QuadraticFormReport:
    basis: list
    gram: np.ndarray
    eigenvalues: np.ndarray
    index: int
    tolerance: float
    spectral_radius: float = 0.0
    vectors: np.ndarray = field(default=None, repr=False)

    def to_json(self):
        return {
            "basis": self.basis,
            "gram": [float(x) for x in self.gram.ravel()],
            "size": int(self.gram.shape[0]),
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "index": int(self.index),
            "tolerance": float(self.tolerance),
        }

    def most_negative_tail(self):
        """Laurent tail along the eigenvector of the smallest eigenvalue."""
        v = self.vectors[:, 0]
        M = v.size // 2
        return LaurentTail(v[0::2] + 1j * v[1::2]) if M else LaurentTail([])


def gram_matrix(W: WeierstrassData, M: int):
    """Gram matrix of ``L_h`` on ``z^-1, i z^-1, ..., z^-M, i z^-M``."""
    basis = []
    for m in range(1, M + 1):
        basis.append(LaurentTail.monomial(m, 1.0))
        basis.append(LaurentTail.monomial(m, 1j))
    diag = [F_alpha(W, b) for b in basis]
    n = len(basis)
    G = np.empty((n, n))
    for a in range(n):
        G[a, a] = diag[a]
        for b in range(a + 1, n):
            val = 0.5 * (F_alpha(W, basis[a] + basis[b]) - diag[a] - diag[b])
            G[a, b] = G[b, a] = val
    return G


def gram_index(W: WeierstrassData, M: int, tolerance=None) -> QuadraticFormReport:
    """Negative index of ``L_h`` restricted to monomial tails up to ``z^-M``.

    ``tolerance`` defaults to ``1e-9`` times the spectral radius; an
    eigenvalue counts as negative when it lies below ``-tolerance``.
    """
    if not 1 <= M <= 64:
        raise DomainError("M must lie in 1..64")
    G = gram_matrix(W, M)
    w, v = np.linalg.eigh(G)
    rho = float(np.max(np.abs(w))) if w.size else 0.0
    tol = 1e-9 * rho if tolerance is None else float(tolerance)
    if tol < 0:
        raise DomainError("tolerance must be non-negative")
    index = int(np.sum(w < -tol))
    basis = []
    for m in range(1, M + 1):
        basis.append({"m": m, "part": "re"})
        basis.append({"m": m, "part": "im"})
    return QuadraticFormReport(basis, G, w, index, tol, rho, v)
