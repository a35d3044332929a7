import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minstab.algebra import LaurentTail, Polynomial
from minstab.errors import DomainError, NotQuasiconformal, SeriesDivergenceRisk
from minstab.quadrature import DiskGrid
from minstab.transforms import (
    BlendedExtension,
    CutoffExtension,
    PlaneGrid,
    beurling_T,
    beurling_multiplier,
    beurling_oracle,
    cauchy_oracle,
    cauchy_P,
    energy_area_after_precomposition,
    equivalent_beltrami_family,
    fd_dz_dzbar,
    nmi_finite_check,
    nmi_infinitesimal_analytic,
    nmi_infinitesimal_check,
    normal_solution_neumann,
    random_beltrami,
    random_compact_beltrami,
    read_field,
    reich_strebel_delta,
    sample_variation,
    smooth_step,
    write_field,
)
from minstab.weierstrass import enneper_family, from_catalog

GRID = PlaneGrid(8.0, 256)
seeds = st.integers(0, 2**31 - 1)


def _bump(s, c=(1.0, 0.5, 0.25j)):
    s = np.asarray(s, dtype=complex)
    r2 = np.minimum(np.abs(s) ** 2, 1 - 1e-15)
    return np.exp(-1.0 / (1.0 - r2)) * (c[0] + c[1] * s + c[2] * np.conj(s) ** 2)


def _snap(grid, pts):
    r, c = grid.index_of(np.asarray(pts))
    return r, c, grid.z[r, c]


def test_plane_grid_constraints():
    with pytest.raises(DomainError):
        PlaneGrid(4.0, 64)
    with pytest.raises(DomainError):
        PlaneGrid(8.0, 65)
    g = PlaneGrid(8.0, 64)
    assert g.valid_radius == 3.0
    assert g.z[g.origin] == 0
    r, c = g.index_of(np.array([0.5 + 0.25j]))
    assert g.z[r[0], c[0]] == 0.5 + 0.25j


def test_support_check():
    h = np.ones(GRID.z.shape)
    with pytest.raises(DomainError):
        cauchy_P(GRID, h)
    with pytest.raises(DomainError):
        beurling_T(GRID, np.zeros((4, 4)))


def test_cauchy_oracle_on_monomials():
    # P(conj(z)^n chi_D) = conj(z)^(n+1)/(n+1) inside, z^-(n+1)/(n+1) outside
    pts = np.array([0.3, 0.5j, -0.4 - 0.2j, 1.5, -2j])
    for n in range(4):
        inside = np.abs(pts) < 1
        exact = np.where(inside, np.conj(pts) ** (n + 1), pts ** (-(n + 1))) / (n + 1)
        orc = cauchy_oracle(lambda s, n=n: np.conj(s) ** n, pts, nrho=64, ntheta=256)
        assert np.max(np.abs(orc - exact)) < 1e-10


def test_beurling_oracle_on_monomials():
    pts = np.array([0.1, 0.4j, -0.3 + 0.3j, 0.6])
    for n in range(5):
        assert np.max(np.abs(beurling_oracle(lambda s, n=n: np.conj(s) ** n, pts))) < 1e-10
    # T(|z|^2 chi_D) = conj(z)^2 / 2 inside the disk
    got = beurling_oracle(lambda s: np.abs(s) ** 2, pts)
    assert np.max(np.abs(got - np.conj(pts) ** 2 / 2)) < 1e-8


def test_grid_P_against_oracle_for_smooth_source():
    h = GRID.sample(_bump)
    u = cauchy_P(GRID, h)
    r, c, pts = _snap(GRID, [0.3, -0.5j, 0.2 + 0.6j, 1.4, -2.0 + 1.0j])
    orc = cauchy_oracle(_bump, pts, nrho=96, ntheta=384)
    assert np.max(np.abs(u[r, c] - orc)) < 1e-6 * np.max(np.abs(orc))
    assert u[GRID.origin] == 0


def test_grid_T_against_pv_oracle_for_smooth_source():
    h = GRID.sample(_bump)
    T = beurling_T(GRID, h)
    r, c, pts = _snap(GRID, [0.1, 0.3j, -0.5 + 0.2j, 0.6])
    pv = beurling_oracle(_bump, pts, nrho=128, ntheta=512)
    assert np.max(np.abs(T[r, c] - pv) / np.abs(pv)) < 1e-4


def test_dzbar_of_P_recovers_source():
    h = GRID.sample(_bump)
    u = cauchy_P(GRID, h)
    inner = np.abs(GRID.z) < GRID.valid_radius
    # the discrete ring kernel aliases slightly, so not quite roundoff
    assert np.max(np.abs(GRID.dzbar(u) - h)[inner]) < 1e-6
    assert np.max(np.abs(GRID.dz(u) - beurling_multiplier(GRID, h))) < 1e-10


def test_fourth_order_differences():
    g = PlaneGrid(8.0, 256)
    u = np.exp(-np.abs(g.z) ** 2) * g.z**2
    uz, uzb = fd_dz_dzbar(g, u)
    ex_z = np.exp(-np.abs(g.z) ** 2) * (2 * g.z - np.conj(g.z) * g.z**2)
    ex_zb = -np.exp(-np.abs(g.z) ** 2) * g.z**3
    assert np.max(np.abs(uz - ex_z)) < 1e-4
    assert np.max(np.abs(uzb - ex_zb)) < 1e-4


def test_field_file_round_trip(tmp_path):
    g = PlaneGrid(8.0, 32)
    v = g.sample(lambda z: z + 1j)
    path = tmp_path / "f.bin"
    write_field(path, g, v)
    g2, v2, header = read_field(path)
    assert g2 == g and np.array_equal(v, v2) and header["support"] == "disk"
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"not json\n")
    with pytest.raises(Exception):
        read_field(bad)
    with pytest.raises(DomainError):
        write_field(path, g, np.zeros((3, 3)))


def test_smooth_step_shape():
    s = np.linspace(-0.5, 1.5, 201)
    S, dS = smooth_step(s)
    assert np.all(S[s <= 0] == 0) and np.all(S[s >= 1] == 1)
    assert np.all(np.diff(S) >= 0)
    mid = (s > 0.05) & (s < 0.95)
    num = np.gradient(S, s)
    assert np.max(np.abs(num[mid] - dS[mid])) < 1e-2


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_blended_extension_is_consistent(seed):
    rng = np.random.default_rng(seed)
    ext = BlendedExtension.random(rng, 3)
    # boundary values equal the common tail and g_i(0) = 0
    zc = np.exp(1j * np.linspace(0, 6, 13))
    for i in range(3):
        assert np.allclose(ext.g(i, 1.2 * zc), ext.phi(1.2 * zc))
        assert abs(ext.g(i, np.array([0j]))[0]) < 1e-15
    # Wirtinger derivatives against central differences
    z = np.array([0.3 + 0.1j, -0.5j, 0.7, 0.2 - 0.6j])
    h = 1e-6
    for i in range(3):
        gx = (ext.g(i, z + h) - ext.g(i, z - h)) / (2 * h)
        gy = (ext.g(i, z + 1j * h) - ext.g(i, z - 1j * h)) / (2 * h)
        assert np.allclose(ext.dz(i, z), 0.5 * (gx - 1j * gy), atol=1e-6)
        assert np.allclose(ext.dzbar(i, z), 0.5 * (gx + 1j * gy), atol=1e-6)
    assert math.isclose(ext.normalized().sup_mudot(), 1.0, rel_tol=1e-12)


def test_blended_variations_are_equivalent_on_the_grid():
    ext = BlendedExtension.random(np.random.default_rng(3), 3).normalized()
    W = enneper_family(1, 1.2)
    eq = [nmi_infinitesimal_check(W, sample_variation(ext, g), g).residuals["equivalence"]
          for g in (PlaneGrid(8.0, 128), PlaneGrid(8.0, 256))]
    assert eq[1] < 1e-5 and eq[1] < 0.1 * eq[0]


def test_finite_check_validates_input():
    g = DiskGrid(16, 64)
    W = from_catalog("pair", 1, 1.0)
    with pytest.raises(ValueError):
        nmi_finite_check(W, [np.zeros(g.shape)], g)
    with pytest.raises(NotQuasiconformal):
        nmi_finite_check(W, [np.ones(g.shape), np.zeros(g.shape)], g)
    assert nmi_finite_check(W, [np.zeros(g.shape)] * 2, g).holds


def test_reich_strebel_delta_is_energy_change_for_equal_mu():
    # for equal mu_i the delta equals E(h o f^-1) - E(h) exactly
    g = PlaneGrid(8.0, 256)
    W = enneper_family(1, 1.2)
    mu = random_compact_beltrami(np.random.default_rng(4), g, 0.2)
    res = energy_area_after_precomposition(W, mu, g)
    assert abs(res.energy - res.energy_before - res.rs_delta) < 1e-12 * res.energy
    assert res.min_pointwise_gap > -1e-12


def test_random_beltrami_bound():
    g = DiskGrid(16, 64)
    mu = random_beltrami(np.random.default_rng(0), g, 0.5)
    assert 0 < np.max(np.abs(mu)) <= 0.5
    assert reich_strebel_delta(from_catalog("plane"), 0, np.zeros(g.shape), g) == 0


def test_neumann_series_converges_geometrically():
    mu = random_compact_beltrami(np.random.default_rng(1), GRID, 0.1)
    sol = normal_solution_neumann(mu, GRID, order=6)
    r = np.array(sol.residuals)
    assert np.all(np.diff(np.log(r)) < -1.0)
    assert sol.f[GRID.origin] == 0
    # Beltrami equation up to the reported residual
    m = GRID.disk_mask
    assert np.max(np.abs(sol.fzbar - mu * sol.fz)[m]) <= 1.01 * sol.residual
    with pytest.raises(SeriesDivergenceRisk):
        normal_solution_neumann(random_compact_beltrami(np.random.default_rng(1), GRID, 0.5), GRID)
    with pytest.raises(DomainError):
        normal_solution_neumann(mu, GRID, order=9)


def test_equivalent_family_is_admissible():
    g = DiskGrid(48, 192)
    ext = BlendedExtension.random(np.random.default_rng(2), 2)
    mus, t = equivalent_beltrami_family(ext, g, 0.6)
    assert t > 0
    assert max(np.max(np.abs(m)) for m in mus) <= 0.6 + 1e-12
    assert nmi_finite_check(from_catalog("pair_skew", 1, 1.0), mus, g).holds
    with pytest.raises(DomainError):
        equivalent_beltrami_family(ext, g, 1.0)


def test_cutoff_extension_destabilises_enneper():
    W = enneper_family(1, 1.2)
    ext = CutoffExtension(W, LaurentTail.monomial(1, 1.0))
    zc = np.exp(1j * np.linspace(0, 6, 7))
    for i in range(3):
        assert np.allclose(ext.g(i, zc), ext.phi(zc), atol=1e-12)
    res = nmi_infinitesimal_analytic(W, ext)
    assert not res.holds
    assert res.residuals["equivalence"] < 1e-5
    with pytest.raises(DomainError):
        CutoffExtension(W, LaurentTail.monomial(1, 1.0), Lambda=40)
    with pytest.raises(DomainError):
        CutoffExtension(W, LaurentTail([]))


def test_cutoff_extension_cannot_destabilise_stable_enneper():
    W = enneper_family(1, 0.8)
    res = nmi_infinitesimal_analytic(W, CutoffExtension(W, LaurentTail.monomial(1, 1.0)))
    assert res.holds
