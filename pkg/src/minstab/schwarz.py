"""Instability through the first Dirichlet eigenvalue of the Gauss-map cap.

If the Gauss image of a minimal disk lies in a spherical cap whose first
Dirichlet eigenvalue is below 2, the surface is unstable.  The image of
``|z| <= r`` under ``g = p3 / (p1 - i p2)`` sits in the cap of colatitude
``2 arctan(max |g|)``; for ``g(z) = c z`` it is exactly that cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .algebra import Polynomial
from .errors import ConvergenceError, DomainError, Unsupported
from .weierstrass import WeierstrassData

ODE_STEP = 1e-4
SERIES_START = 0.01
MIN_THETA0 = 0.05
BRACKET = (0.1, 200.0)
BOUNDARY_SAMPLES = 4096


@dataclass(frozen=True)
class GaussMap:
    """``g = numerator / denominator`` in stereographic coordinates."""

    numerator: Polynomial
    denominator: Polynomial

    def __call__(self, z):
        return self.numerator(z) / self.denominator(z)

    @property
    def scale(self):
        """``c`` when ``g(z) = c z`` identically, else ``None``."""
        num, den = self.numerator, self.denominator
        if den.degree != 0 or num.degree != 1 or num.coeff(0) != 0:
            return None
        return num.coeff(1) / den.coeff(0)

    def to_json(self):
        return {"numerator": self.numerator.to_json(), "denominator": self.denominator.to_json()}


@dataclass(frozen=True)
class CapSpec:
    theta0: float
    rho: float = float("nan")
    enclosure: bool = False

    def __post_init__(self):
        if not 0.0 < self.theta0 < math.pi:
            raise DomainError(f"cap colatitude {self.theta0} must lie in (0, pi)")


def gauss_map_stereographic(W: WeierstrassData) -> GaussMap:
    if W.n != 3:
        raise Unsupported(f"the Gauss map needs n = 3 coordinates, got {W.n}")
    p1, p2, p3 = W.polys
    den = p1 - p2 * 1j
    if den.is_zero():
        raise Unsupported("p1 - i p2 vanishes identically; the Gauss map sits at the pole")
    return GaussMap(p3, den)


def cap_of_disk_image(g: GaussMap, r=1.0) -> CapSpec:
    """Cap ``theta <= 2 arctan(rho)`` with ``rho = max_{|z| <= r} |g|``.

    The maximum sits on ``|z| = r`` once ``g`` has no pole in the closed
    disk.  ``enclosure`` is set when ``g`` is not a scaled identity, in
    which case the image is only contained in the cap.
    """
    r = float(r)
    if not r > 0:
        raise DomainError("radius must be positive")
    c = g.scale
    if c is not None:
        rho = abs(c) * r
    else:
        den = g.denominator
        if den.degree > 0:
            poles = np.roots(den.coeffs[::-1])
            if np.any(np.abs(poles) <= r * (1.0 + 1e-12)):
                raise Unsupported("the Gauss map has a pole in the closed disk")
        th = 2.0 * math.pi * np.arange(BOUNDARY_SAMPLES) / BOUNDARY_SAMPLES
        rho = float(np.max(np.abs(g(r * np.exp(1j * th)))))
    if rho == 0:
        raise Unsupported("the Gauss image is a single point")
    return CapSpec(2.0 * math.atan(rho), rho, c is None)


def _series(lam, t):
    """Regular solution ``u = 1 + a t^2 + b t^4 + c t^6`` and ``u'`` near 0."""
    a = -lam / 4.0
    b = lam * (lam - 2.0 / 3.0) / 64.0
    c = (4.0 * b / 3.0 + 2.0 * a / 45.0 - lam * b) / 36.0
    u = 1.0 + t * t * (a + t * t * (b + t * t * c))
    du = t * (2.0 * a + t * t * (4.0 * b + 6.0 * c * t * t))
    return u, du


class _Shooter:
    """RK4 for ``u'' + cot(t) u' + lam u = 0`` on ``[t_s, theta0]``.

    Cotangents at the nodes and midpoints are computed once per cap; the
    final step is shortened to land on ``theta0``.
    """

    def __init__(self, theta0, step=ODE_STEP, start=SERIES_START):
        if theta0 < MIN_THETA0:
            raise DomainError(f"cap colatitude must be at least {MIN_THETA0}")
        self.theta0 = theta0
        self.start = start
        n = int(math.ceil((theta0 - start) / step - 1e-9))
        t = start + step * np.arange(n + 1)
        t[-1] = theta0
        self.h = np.diff(t).tolist()
        self.c0 = (1.0 / np.tan(t[:-1])).tolist()
        self.cm = (1.0 / np.tan(t[:-1] + 0.5 * np.diff(t))).tolist()
        self.c1 = (1.0 / np.tan(t[1:])).tolist()

    def shoot(self, lam):
        """``(u(theta0), sign changes of u on the way)``."""
        u, v = _series(lam, self.start)
        changes = 0
        for h, c0, cm, c1 in zip(self.h, self.c0, self.cm, self.c1):
            k1u = v
            k1v = -c0 * v - lam * u
            u2 = u + 0.5 * h * k1u
            v2 = v + 0.5 * h * k1v
            k2u = v2
            k2v = -cm * v2 - lam * u2
            u3 = u + 0.5 * h * k2u
            v3 = v + 0.5 * h * k2v
            k3u = v3
            k3v = -cm * v3 - lam * u3
            u4 = u + h * k3u
            v4 = v + h * k3v
            k4u = v4
            k4v = -c1 * v4 - lam * u4
            un = u + h * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
            v = v + h * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
            if (un < 0.0) != (u < 0.0):
                changes += 1
            u = un
        return u, changes


def lambda1_cap(cap: CapSpec, tolerance=1e-8, step=ODE_STEP) -> float:
    """First Dirichlet eigenvalue of the cap ``theta <= theta0``.

    Sturm comparison brackets the root: ``lam < lambda1`` exactly when the
    regular solution keeps its sign on ``(0, theta0]``.  Bisection on that
    predicate narrows the bracket to 1 percent, then ``brentq`` solves
    ``u(theta0; lam) = 0``.  The upper end of the bracket is doubled until
    it exceeds ``lambda1`` (small caps need more than 200).
    """
    if not tolerance > 0:
        raise DomainError("tolerance must be positive")
    sh = _Shooter(cap.theta0, step)

    def below(lam):
        u, changes = sh.shoot(lam)
        return changes == 0 and u > 0

    lo, hi = BRACKET
    if not below(lo):
        raise ConvergenceError("lambda1 lies below the bracket")
    for _ in range(20):
        if not below(hi):
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ConvergenceError("could not bracket lambda1")
    while hi - lo > 0.01 * lo:
        mid = 0.5 * (lo + hi)
        if below(mid):
            lo = mid
        else:
            hi = mid
    return brentq(lambda lam: sh.shoot(lam)[0], lo, hi, xtol=0.1 * tolerance, rtol=1e-15, maxiter=200)


@dataclass(frozen=True)
class SchwarzVerdict:
    rho: float
    theta0: float
    lambda1: float
    unstable: bool
    inconclusive: bool
    enclosure: bool
    tolerance: float

    def to_json(self):
        return {
            "rho": self.rho,
            "theta0": self.theta0,
            "lambda1": self.lambda1,
            "unstable": self.unstable,
            "inconclusive": self.inconclusive,
            "enclosure": self.enclosure,
            "tolerance": self.tolerance,
        }


def schwarz_verdict(W: WeierstrassData, r=1.0, tolerance=1e-6) -> SchwarzVerdict:
    """``unstable`` when ``lambda1 < 2 - tolerance``; the band ``|lambda1 - 2| <= tolerance`` is inconclusive.

    With ``enclosure`` set, only ``unstable = True`` carries information.
    """
    cap = cap_of_disk_image(gauss_map_stereographic(W), r)
    lam = lambda1_cap(cap, tolerance=min(tolerance, 1e-8))
    inconclusive = abs(lam - 2.0) <= tolerance
    return SchwarzVerdict(cap.rho, cap.theta0, lam, (not inconclusive) and lam < 2.0,
                          inconclusive, cap.enclosure, tolerance)
