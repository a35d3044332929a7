"""Infinitesimal inequality, second-variation identities and normal solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, SeriesDivergenceRisk
from ..quadrature import DiskGrid
from ..weierstrass import WeierstrassData
from .functionals import (
    InequalityResult,
    disk_integral,
    holds_tolerance,
    hopf,
    reich_strebel_delta,
)
from .plane import PlaneGrid, beurling_T, cauchy_P, fd_dz_dzbar

NEUMANN_MAX_MU = 0.3
NEUMANN_MAX_ORDER = 6


def _outside_mask(grid: PlaneGrid):
    r = np.abs(grid.z)
    return (r > 1.0) & (r <= grid.valid_radius)


def equivalence_residual(grid: PlaneGrid, Ps):
    """Largest ``sup |P(mudot_i) - P(mudot_j)|`` outside the disk."""
    out = _outside_mask(grid)
    worst = 0.0
    for a in range(len(Ps)):
        for b in range(a + 1, len(Ps)):
            worst = max(worst, float(np.max(np.abs(Ps[a][out] - Ps[b][out]))))
    return worst


def nmi_infinitesimal_check(W: WeierstrassData, mudots, grid: PlaneGrid) -> InequalityResult:
    """Quadratic inequality ``-Re sum int phi_i mudot_i T(mudot_i) <= sum int |phi_i||mudot_i|^2``.

    ``residuals["equivalence"]`` certifies that the ``mudot_i`` are
    mutually infinitesimally equivalent (equal ``P`` outside the disk).
    """
    if len(mudots) != W.n:
        raise DomainError(f"need {W.n} variation fields, got {len(mudots)}")
    lhs = 0.0
    rhs = 0.0
    Ps = []
    for i, md in enumerate(mudots):
        md = np.asarray(md, dtype=complex)
        if not np.any(md):
            Ps.append(np.zeros(grid.z.shape, dtype=complex))
            continue
        phi = hopf(W, i, grid.z)
        T = beurling_T(grid, md)
        Ps.append(cauchy_P(grid, md, check=False))
        lhs -= float(np.real(disk_integral(grid, phi * md * T)))
        rhs += float(np.real(disk_integral(grid, np.abs(phi) * np.abs(md) ** 2)))
    eq = equivalence_residual(grid, Ps)
    return InequalityResult(lhs, rhs, lhs <= rhs + holds_tolerance(lhs, rhs), {"equivalence": eq})


def sample_variation(ext, grid: PlaneGrid):
    """``mudot_i`` of an extension sampled on ``grid`` (zero outside the disk)."""
    return [grid.sample(lambda z, i=i: ext.mudot(i, z)) for i in range(ext.n)]


def nmi_infinitesimal_analytic(W: WeierstrassData, ext, probes=None, **rule_kw) -> InequalityResult:
    """The same inequality for an extension with closed-form derivatives.

    Integrals use ``ext.blocks(i)`` and ``T(mudot_i) = (g_i)_z``.  The
    equivalence residual compares ``P(mudot_i)`` at ``probes`` outside the
    disk, each evaluated by kernel quadrature with the same rule.
    """
    if probes is None:
        ang = 2.0 * math.pi * np.arange(8) / 8
        probes = np.concatenate([1.5 * np.exp(1j * ang), 2.5 * np.exp(1j * (ang + 0.3))])
    probes = np.asarray(probes, dtype=complex)
    lhs = 0.0
    rhs = 0.0
    Pvals = []
    for i in range(W.n):
        Pv = np.zeros(probes.shape, dtype=complex)
        for z, w, local in ext.blocks(i, **rule_kw):
            P, _, gz, gzb = ext.values(i, z, local)
            phi = P * P
            lhs -= float(np.real(np.sum(w * phi * gzb * gz)))
            rhs += float(np.sum(w * np.abs(phi) * np.abs(gzb) ** 2))
            wm = w * gzb
            Pv -= (1.0 / (z.ravel()[None, :] - probes[:, None])) @ wm.ravel() / math.pi
            Pv += _origin_moment(z, wm, local) / math.pi
        Pvals.append(Pv)
    eq = 0.0
    for a in range(len(Pvals)):
        for b in range(a + 1, len(Pvals)):
            eq = max(eq, float(np.max(np.abs(Pvals[a] - Pvals[b]))))
    return InequalityResult(lhs, rhs, lhs <= rhs + holds_tolerance(lhs, rhs), {"equivalence": eq})


def _origin_moment(z, wm, local):
    """``sum wm / z``, the normalising term of ``P`` at 0.

    On a polar patch centred at the origin ``wm`` is nearly radial and
    huge at small radii while ``1/z`` averages to zero on each ring, so
    the ring means are removed first (exact for the uniform angular rule).
    """
    if local is not None and np.all(z == local[1]):
        wm = wm - wm.mean(axis=1, keepdims=True)
    return np.sum(wm / z)


@dataclass(frozen=True)
class IdentityResiduals:
    residual1: float
    residual2: float
    lhs_T: float
    lhs_alphaP: float
    rhs_mu: float
    rhs_alphaP: float

    def to_json(self):
        return {k: float(v) for k, v in self.__dict__.items()}


def identity_P1_P2_check(W: WeierstrassData, mudots, grid: PlaneGrid) -> IdentityResiduals:
    """Compare the quadratic form in its ``T`` form and its ``alpha P`` form.

    The ``T`` side uses the FFT Beurling transform; the ``alpha P`` side
    differentiates ``p_i P(mudot_i)`` with fourth-order differences.  For
    mutually equivalent ``mudot_i``

        Re sum int phi_i mudot_i T mudot_i = Re sum int (p_i P_i)_z (p_i P_i)_zbar,
        sum int |phi_i| |mudot_i|^2        = sum int |(p_i P_i)_zbar|^2.
    """
    a1 = a2 = b1 = b2 = 0.0
    for i, md in enumerate(mudots):
        md = np.asarray(md, dtype=complex)
        if not np.any(md):
            continue
        p = W.polys[i]
        pz = p(grid.z)
        T = beurling_T(grid, md)
        a1 += float(np.real(disk_integral(grid, pz * pz * md * T)))
        b1 += float(np.real(disk_integral(grid, np.abs(pz) ** 2 * np.abs(md) ** 2)))
        u = pz * cauchy_P(grid, md, check=False)
        uz, uzb = fd_dz_dzbar(grid, u)
        a2 += float(np.real(disk_integral(grid, uz * uzb)))
        b2 += float(np.real(disk_integral(grid, np.abs(uzb) ** 2)))
    return IdentityResiduals(abs(a1 - a2), abs(b1 - b2), -a1, -a2, b1, b2)


def rs_along_path(W: WeierstrassData, ext, t, grid: DiskGrid):
    """``sum_i`` Reich-Strebel delta of ``mu_i(t) = t g_zbar / (1 + t g_z)``.

    This is the Beltrami coefficient of ``z + t g_i``, the exact path whose
    first-order direction is ``mudot_i``.
    """
    total = 0.0
    for i in range(W.n):
        gz, gzb = ext.derivatives(i, grid.z)
        mu = t * gzb / (1.0 + t * gz)
        total += reich_strebel_delta(W, i, mu, grid)
    return total


def second_variation_fd(W: WeierstrassData, ext, grid: DiskGrid | None = None, ts=(0.02, 0.04)):
    """Richardson-extrapolated ``d^2/dt^2`` of the summed delta at ``t = 0``.

    Central differences at ``t`` and ``2t`` have errors ``c t^2``; the
    combination ``(4 D(t) - D(2t)) / 3`` removes it.  The result should
    equal ``8 (rhs - lhs)`` of :func:`nmi_infinitesimal_check`.
    """
    grid = DiskGrid(96, 384) if grid is None else grid
    t1, t2 = ts
    if not math.isclose(t2, 2.0 * t1):
        raise DomainError("Richardson step needs ts = (t, 2t)")
    f0 = rs_along_path(W, ext, 0.0, grid)

    def d2(t):
        return (rs_along_path(W, ext, t, grid) - 2.0 * f0 + rs_along_path(W, ext, -t, grid)) / (t * t)

    return (4.0 * d2(t1) - d2(t2)) / 3.0


@dataclass
class NeumannSolution:
    f: np.ndarray
    fz: np.ndarray
    fzbar: np.ndarray
    residuals: list = field(default_factory=list)
    order: int = 0

    @property
    def residual(self):
        return self.residuals[-1] if self.residuals else 0.0


def normal_solution_neumann(mu, grid: PlaneGrid, order=4) -> NeumannSolution:
    """``f = z + P(mu) + P(mu T mu) + ...`` truncated after ``order + 1`` terms.

    With ``nu_0 = mu`` and ``nu_{k+1} = mu T(nu_k)`` the partial sums give
    ``f_zbar - mu f_z = -nu_{order+1}``; ``residuals[k]`` is the sup of that
    quantity after ``k + 1`` terms, so it falls like ``(C ||mu||)^k``.
    """
    mu = np.asarray(mu, dtype=complex)
    if not 0 <= order <= NEUMANN_MAX_ORDER:
        raise DomainError(f"order must lie in 0..{NEUMANN_MAX_ORDER}")
    m = float(np.max(np.abs(mu))) if mu.size else 0.0
    if m > NEUMANN_MAX_MU:
        raise SeriesDivergenceRisk(f"||mu||_inf = {m:.3g} exceeds {NEUMANN_MAX_MU}")
    f = grid.z.copy()
    fz = np.ones(grid.z.shape, dtype=complex)
    fzbar = np.zeros(grid.z.shape, dtype=complex)
    residuals = []
    if m == 0.0:
        return NeumannSolution(f, fz, fzbar, [0.0] * (order + 1), order)
    nu = mu
    for _ in range(order + 1):
        T = beurling_T(grid, nu, check=False)
        f = f + cauchy_P(grid, nu, check=False)
        fz = fz + T
        fzbar = fzbar + nu
        nu = np.where(grid.disk_mask, mu * T, 0.0)
        residuals.append(float(np.max(np.abs(nu))))
    return NeumannSolution(f, fz, fzbar, residuals, order)


@dataclass(frozen=True)
class EnergyAreaResult:
    energy: float
    area: float
    energy_before: float
    rs_delta: float
    min_pointwise_gap: float

    @property
    def holds(self):
        return self.energy >= self.area - 1e-6 * abs(self.area)

    def to_json(self):
        d = {k: float(v) for k, v in self.__dict__.items()}
        d["holds"] = bool(self.holds)
        return d


def energy_area_after_precomposition(W: WeierstrassData, mu, grid: PlaneGrid, order=5) -> EnergyAreaResult:
    """Energy of ``h o f^{-1}`` against the area of ``h``.

    ``f`` is the Neumann-series normal solution for ``mu``.  Pulling back
    to the disk, ``(h o f^{-1})_w = (h_z conj(f_z) - conj(h_z) conj(f_zbar)) / J``
    with ``J = |f_z|^2 - |f_zbar|^2``.  Also returns the Reich-Strebel
    prediction of the energy change, using the Beltrami coefficient of the
    computed ``f``.
    """
    sol = normal_solution_neumann(mu, grid, order)
    mask = grid.disk_mask
    J = np.abs(sol.fz) ** 2 - np.abs(sol.fzbar) ** 2
    if np.min(J[mask]) <= 0:
        raise DomainError("precomposition map is not orientation preserving on the grid")
    z = grid.z
    e_dens = np.zeros(z.shape)
    e0_dens = np.zeros(z.shape)
    hx = []
    hy = []
    for p in W.polys:
        hz = p(z)
        Hw = hz * np.conj(sol.fz) - np.conj(hz) * np.conj(sol.fzbar)
        e_dens += 2.0 * np.abs(Hw) ** 2 / J
        e0_dens += 2.0 * np.abs(hz) ** 2
        hx.append(2.0 * np.real(hz))
        hy.append(-2.0 * np.imag(hz))
    hx = np.array(hx)
    hy = np.array(hy)
    g11 = np.sum(hx * hx, axis=0)
    g22 = np.sum(hy * hy, axis=0)
    g12 = np.sum(hx * hy, axis=0)
    a_dens = np.sqrt(np.maximum(g11 * g22 - g12 * g12, 0.0))
    energy = float(disk_integral(grid, e_dens).real)
    area = float(disk_integral(grid, a_dens).real)
    e0 = float(disk_integral(grid, e0_dens).real)
    mu_f = np.where(mask, sol.fzbar / sol.fz, 0.0)
    rs = sum(reich_strebel_delta(W, i, mu_f, grid) for i in range(W.n))
    gap = float(np.min((e_dens - a_dens)[mask]))
    return EnergyAreaResult(energy, area, e0, rs, gap)


def equivalent_beltrami_family(ext, grid, bound=0.9):
    """Beltrami coefficients of ``f_i = z + t g_i``, scaled so ``max |mu_i| = bound``.

    Outside the disk every ``f_i`` equals ``z + t phi`` (the common tail),
    so the maps agree there.  ``t`` is also kept below ``1/sup|phi'|`` on
    the circle so that ``z + t phi`` stays locally injective outside.
    Returns ``(mus, t)`` with ``mus`` sampled on ``grid``.
    """
    if not 0 < bound < 1:
        raise DomainError("bound must lie in (0, 1)")
    ders = [ext.derivatives(i, grid.z) for i in range(ext.n)]

    def sup_mu(t):
        return max(float(np.max(np.abs(t * gzb / (1.0 + t * gz)))) for gz, gzb in ders)

    th = 2.0 * math.pi * np.arange(512) / 512
    dphi = float(np.max(np.abs(ext.phi.dz(np.exp(1j * th)))))
    t_hi = 0.99 / dphi if dphi > 0 else 1e6
    # sup_mu is increasing for small t; bisect up to the first crossing
    lo, hi = 0.0, t_hi
    if sup_mu(hi) <= bound:
        t = hi
    else:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if sup_mu(mid) < bound:
                lo = mid
            else:
                hi = mid
        t = lo
    mus = [t * gzb / (1.0 + t * gz) for gz, gzb in ders]
    return mus, t
