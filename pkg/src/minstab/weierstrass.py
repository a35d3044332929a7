"""Weierstrass-Enneper data, surface reconstruction and mesh export.

The datum is the tuple of polynomials ``p_i`` with ``sum p_i^2 = 0``.
Coordinates are rebuilt as ``h_i = 2 Re A_i`` with ``A_i' = p_i`` and
``A_i(0) = 0``, so that ``d h_i / dz = p_i`` holds exactly.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    Polynomial,
    min_modulus_on_circle,
    poly_antiderivative,
    poly_derivative,
    reparam_scale,
)
from .errors import AdmissibilityViolation, DomainError, MinimalityViolation
from .quadrature import DiskGrid

log = logging.getLogger(__name__)

SUM_OF_SQUARES_TOL = 1e-12
BOUNDARY_ZERO_TOL = 1e-9
CIRCLE_SAMPLES = 4096


@dataclass(frozen=True)
class WeierstrassData:
    polys: tuple
    label: str = ""
    radius: float = 1.0

    @property
    def n(self):
        return len(self.polys)

    @property
    def max_degree(self):
        return max(p.degree for p in self.polys)

    def antiderivatives(self):
        return tuple(poly_antiderivative(p) for p in self.polys)

    def to_json(self):
        return {
            "label": self.label,
            "n": self.n,
            "polys": [p.to_json() for p in self.polys],
            "r": 1.0,
        }


def sum_of_squares(polys):
    acc = Polynomial([0.0])
    for p in polys:
        acc = acc + p * p
    return acc


def validate(polys, label="", check_boundary=True, radius=1.0) -> WeierstrassData:
    """Check minimality and admissibility, returning immutable data.

    Raises
    ------
    MinimalityViolation
        ``sum p_i^2`` has a coefficient above ``1e-12`` (scaled by the
        largest squared coefficient when that exceeds one).
    AdmissibilityViolation
        some ``p_i`` has a zero on the unit circle, i.e. the certified
        lower bound on ``|p_i|`` there does not exceed ``1e-9``.
    """
    polys = tuple(p if isinstance(p, Polynomial) else Polynomial(p) for p in polys)
    if len(polys) < 2:
        raise DomainError("Weierstrass data needs n >= 2 coordinates")
    if all(p.is_zero() for p in polys):
        raise MinimalityViolation("all coordinates vanish identically", index=None)
    s = sum_of_squares(polys)
    scale = max(1.0, max(float(np.max(np.abs(p.coeffs))) ** 2 for p in polys))
    resid = np.abs(s.coeffs)
    j = int(np.argmax(resid))
    if resid[j] > SUM_OF_SQUARES_TOL * scale:
        raise MinimalityViolation(
            f"sum of p_i^2 has coefficient {resid[j]:.3e} at z^{j}",
            index=None,
            detail={"coefficient": j, "residual": float(resid[j])},
        )
    if check_boundary:
        for i, p in enumerate(polys):
            if p.is_zero():
                continue
            samples = max(CIRCLE_SAMPLES, 4 * (p.degree + 1))
            cm = min_modulus_on_circle(p, samples)
            if cm.lower_bound <= BOUNDARY_ZERO_TOL:
                raise AdmissibilityViolation(
                    f"p_{i + 1} has a zero on the unit circle "
                    f"(min |p| ~ {cm.minimum:.3e} near theta={cm.theta:.4f})",
                    index=i,
                    detail={
                        "min_modulus": cm.minimum,
                        "lower_bound": cm.lower_bound,
                        "theta": cm.theta,
                    },
                )
    return WeierstrassData(polys, label, float(radius))


def enneper_polys(k=1):
    """Raw Enneper-type data ``((1 - z^2k)/2, i(1 + z^2k)/2, z^k)``."""
    if k < 1:
        raise DomainError("Enneper order k must be >= 1")
    one = Polynomial([1.0])
    z2k = Polynomial.monomial(2 * k)
    p1 = (one - z2k) * 0.5
    p2 = (one + z2k) * 0.5j
    p3 = Polynomial.monomial(k)
    return (p1, p2, p3)


def enneper_family(k=1, r=1.0, check_boundary=True) -> WeierstrassData:
    """Enneper data of order ``k`` restricted to the disk of radius ``r``."""
    r = float(r)
    if not r > 0:
        raise DomainError("radius must be positive")
    polys = tuple(reparam_scale(p, r) for p in enneper_polys(k))
    return validate(polys, label=f"enneper(k={k}, r={r:g})",
                    check_boundary=check_boundary, radius=r)


def pair_family(p: Polynomial, label="pair") -> WeierstrassData:
    """Planar (n = 2) data ``(p, i p)``."""
    return validate((p, p * 1j), label=label)


# Named surfaces reachable from the command line.  Each entry takes
# ``k`` and ``r`` keyword parameters.
def _catalog_plane(k=1, r=1.0):
    return pair_family(reparam_scale(Polynomial([1.0]), r), label=f"plane(r={r:g})")


def _catalog_pair(k=1, r=1.0):
    # 2 + z^k has its zeros on |z| = 2^(1/k) > 1
    base = Polynomial([2.0]) + Polynomial.monomial(k)
    return pair_family(reparam_scale(base, r), label=f"pair(k={k}, r={r:g})")


def _catalog_pair_skew(k=1, r=1.0):
    # zeros inside the disk, none on the circle for r in a generic range
    base = Polynomial([0.3 + 0.2j, 0.0, 1.0]) * Polynomial([1.0, 0.5j])
    base = base * Polynomial.monomial(k - 1) if k > 1 else base
    return pair_family(reparam_scale(base, r), label=f"pair_skew(k={k}, r={r:g})")


CATALOG = {
    "enneper": lambda k=1, r=1.0: enneper_family(k, r),
    "plane": _catalog_plane,
    "pair": _catalog_pair,
    "pair_skew": _catalog_pair_skew,
}

PLANAR_CATALOG = ("plane", "pair", "pair_skew")


def from_catalog(name, k=1, r=1.0) -> WeierstrassData:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise DomainError(
            f"unknown catalog surface {name!r}; choose from {sorted(CATALOG)}"
        ) from None
    return factory(k=int(k), r=float(r))


def from_descriptor(desc: dict) -> WeierstrassData:
    """Load ``{label, n, polys, r}``; ``polys`` are rescaled by ``r``."""
    if not isinstance(desc, dict) or "polys" not in desc:
        raise DomainError("surface descriptor must be an object with 'polys'")
    polys = [Polynomial.from_json(p) for p in desc["polys"]]
    if "n" in desc and int(desc["n"]) != len(polys):
        raise DomainError(f"descriptor says n={desc['n']} but lists {len(polys)} polys")
    r = float(desc.get("r", 1.0))
    if r != 1.0:
        polys = [reparam_scale(p, r) for p in polys]
    return validate(polys, label=str(desc.get("label", "")), radius=r)


def load_descriptor(path) -> WeierstrassData:
    with open(path, encoding="utf-8") as fh:
        return from_descriptor(json.load(fh))


def surface_eval(W: WeierstrassData, z):
    """``h(z)`` in R^n; the last axis indexes coordinates."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1.0 + 1e-12):
        raise DomainError("surface_eval needs |z| <= 1")
    pts = [2.0 * np.real(A(z)) for A in W.antiderivatives()]
    return np.stack(pts, axis=-1)


def area_density(W: WeierstrassData, z):
    """``|h_x ^ h_y|`` from ``h_x = 2 Re p``, ``h_y = -2 Im p``."""
    hx = np.stack([2.0 * np.real(p(z)) for p in W.polys], axis=-1)
    hy = np.stack([-2.0 * np.imag(p(z)) for p in W.polys], axis=-1)
    g11 = np.sum(hx * hx, axis=-1)
    g22 = np.sum(hy * hy, axis=-1)
    g12 = np.sum(hx * hy, axis=-1)
    return np.sqrt(np.maximum(g11 * g22 - g12 * g12, 0.0))


def energy_closed_form(W: WeierstrassData, r=1.0):
    """``int_{D_r} 2 sum |p_i|^2 dA`` from the coefficient formula."""
    total = 0.0
    for p in W.polys:
        a = p.coeffs
        j = np.arange(a.size)
        total += math.pi * float(np.sum(np.abs(a) ** 2 * r ** (2 * j + 2) / (j + 1)))
    return 2.0 * total


@dataclass(frozen=True)
class EnergyArea:
    energy: float
    area: float
    energy_quadrature: float
    area_quadrature: float


def energy_and_area(W: WeierstrassData, r=1.0, grid: DiskGrid | None = None) -> EnergyArea:
    r = float(r)
    if not 0 < r <= 1:
        raise DomainError("energy radius must lie in (0, 1]")
    e = energy_closed_form(W, r)
    if grid is None:
        grid = DiskGrid(nr=W.max_degree + 4, ntheta=4 * W.max_degree + 8)
    z = r * grid.z
    dens = 2.0 * sum(np.abs(p(z)) ** 2 for p in W.polys)
    eq = r * r * grid.integrate(dens)
    aq = r * r * grid.integrate(area_density(W, z))
    return EnergyArea(e, e, float(eq), float(aq))


@dataclass
class SurfaceSample:
    nr: int
    ntheta: int
    z: np.ndarray
    points: np.ndarray
    jacobian: np.ndarray
    triangles: np.ndarray = field(repr=False)

    def to_obj(self, coords=(0, 1, 2)):
        lines = [f"# {self.points.shape[0]} vertices, {self.triangles.shape[0]} faces"]
        for pt in self.points:
            xyz = [pt[c] if c < pt.size else 0.0 for c in coords]
            lines.append("v {:.12g} {:.12g} {:.12g}".format(*xyz))
        for a, b, c in self.triangles:
            lines.append(f"f {a + 1} {b + 1} {c + 1}")
        return "\n".join(lines) + "\n"


def polar_mesh(nr, ntheta):
    """Center plus ``nr`` rings of ``ntheta`` points, and the triangles."""
    if nr < 1 or ntheta < 3:
        raise DomainError("mesh needs nr >= 1 and ntheta >= 3")
    rad = np.arange(1, nr + 1) / nr
    ang = 2.0 * np.pi * np.arange(ntheta) / ntheta
    z = np.concatenate([[0j], (rad[:, None] * np.exp(1j * ang[None, :])).ravel()])
    tris = []
    for t in range(ntheta):
        tris.append((0, 1 + t, 1 + (t + 1) % ntheta))
    for ring in range(nr - 1):
        base0 = 1 + ring * ntheta
        base1 = base0 + ntheta
        for t in range(ntheta):
            t1 = (t + 1) % ntheta
            tris.append((base0 + t, base1 + t, base1 + t1))
            tris.append((base0 + t, base1 + t1, base0 + t1))
    return z, np.array(tris, dtype=np.int64)


def mesh_export(W: WeierstrassData, nr=32, ntheta=64) -> SurfaceSample:
    if W.n != 3:
        log.warning("OBJ export uses the first three of %d coordinates", W.n)
    z, tris = polar_mesh(nr, ntheta)
    pts = surface_eval(W, z)
    jac = area_density(W, z)
    return SurfaceSample(nr, ntheta, z, pts, jac, tris)


def derivative_data(W: WeierstrassData):
    """``(p_i, p_i')`` pairs, used by the transform checks."""
    return [(p, poly_derivative(p)) for p in W.polys]
