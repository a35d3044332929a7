"""Acceptance criteria, one test each, with their tolerances and time budgets.

Every test records a single ``ACCEPTANCE n PASS|FAIL`` line through the
``acceptance`` fixture; the lines are repeated in the pytest summary.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np

from minstab.algebra import Polynomial
from minstab.cli import main
from minstab.harmonic import HarmonicField
from minstab.quadrature import DiskGrid
from minstab.schwarz import CapSpec, cap_of_disk_image, gauss_map_stereographic, lambda1_cap, schwarz_verdict
from minstab.spectral import C_canonical, F_spectral, gram_index
from minstab.transforms import (
    BlendedExtension,
    F_field,
    PlaneGrid,
    beurling_multiplier,
    beurling_oracle,
    beurling_T,
    cauchy_P,
    energy_area_after_precomposition,
    equivalent_beltrami_family,
    identity_P1_P2_check,
    nmi_finite_check,
    nmi_infinitesimal_check,
    random_compact_beltrami,
    sample_variation,
    second_variation_fd,
)
from minstab.weierstrass import CATALOG, PLANAR_CATALOG, enneper_family, from_catalog


def _rng(*stream):
    return np.random.default_rng([20240, *stream])


def test_enneper_destabilizing_coefficient(tmp_path, acceptance):
    t0 = time.perf_counter()
    worst = 0.0
    flags_ok = True
    for r in (0.8, 0.9, 1.1, 1.2, 1.5):
        out = tmp_path / f"destab_{r}.json"
        code = main(["destab", "--catalog", "enneper", "--r", str(r), "--m-min", "1", "--m-max", "1",
                     "--gamma", "1", "-q", "-o", str(out)])
        doc = json.loads(out.read_text())
        row = doc["per_m"][0]
        expect = math.pi * (r**2 / 2) * (1 - r**2)
        worst = max(worst, abs(row["sum_C_canonical"] - expect) / abs(expect))
        flags_ok &= code == 0 and doc["unstable"] == (r > 1) and row["destabilizing"] == (r > 1)
    dt = time.perf_counter() - t0
    ok = acceptance(1, worst <= 1e-10 and flags_ok and dt < 1.0,
                    f"Enneper sum C max rel err {worst:.2e}, flags exact={flags_ok}, {dt:.2f}s")
    assert ok


def test_quadratic_closed_form(acceptance):
    t0 = time.perf_counter()
    rng = _rng(2)
    worst = 0.0
    for _ in range(100):
        a, b, c = rng.normal(size=3) + 1j * rng.normal(size=3)
        got = C_canonical(Polynomial([c, b, a]), 1.0, 1)
        expect = math.pi * (abs(c) ** 2 + (a * c).real)
        worst = max(worst, abs(got - expect))
    dt = time.perf_counter() - t0
    ok = acceptance(2, worst <= 1e-10 and dt < 1.0, f"100 quadratics max abs err {worst:.2e}, {dt:.2f}s")
    assert ok


def _field_scale(f):
    k = np.arange(1, f.K + 1)
    cp = f.coeffs[f.K + 1:]
    cm = f.coeffs[: f.K][::-1]
    return math.pi * float(np.sum(k * (np.abs(cp) ** 2 + np.abs(cm) ** 2)))


def test_spectral_quadrature_agreement(acceptance):
    t0 = time.perf_counter()
    rng = _rng(3)
    fine = DiskGrid(64, 256)
    worst = 0.0
    decreasing = True
    for t in range(100):
        K = int(rng.integers(1, 13))
        f = HarmonicField(rng.normal(size=2 * K + 1) + 1j * rng.normal(size=2 * K + 1))
        Fs = F_spectral(f)
        # relative to |F| with a floor, since F can nearly cancel
        denom = max(abs(Fs), 1e-3 * _field_scale(f))
        worst = max(worst, abs(F_field(f, fine) - Fs) / denom)
        # coarse-to-fine: the error must not grow once the grid doubles,
        # until it reaches the roundoff floor
        errs = [abs(F_field(f, DiskGrid(n, 4 * n)) - Fs) / denom for n in (1, 2, 4, 8, 16, 32, 64)]
        for e0, e1 in zip(errs, errs[1:]):
            if e1 > max(e0, 1e-13):
                decreasing = False
        if K >= 3 and not errs[0] > 1e-6:
            decreasing = False
    dt = time.perf_counter() - t0
    ok = acceptance(3, worst <= 1e-6 and decreasing and dt < 30,
                    f"100 fields K<=12 max rel err {worst:.2e}, decreasing={decreasing}, {dt:.2f}s")
    assert ok


def _bump(c):
    def fn(s):
        s = np.asarray(s, dtype=complex)
        r2 = np.minimum(np.abs(s) ** 2, 1 - 1e-15)
        poly = np.polynomial.polynomial.polyval2d(s, np.conj(s), c)
        return np.exp(-1.0 / (1.0 - r2)) * poly
    return fn


def test_operator_identities(acceptance):
    t0 = time.perf_counter()
    g = PlaneGrid(8.0, 256)
    inner = np.abs(g.z) < g.valid_radius
    rng = _rng(4)
    r1 = r2 = r3 = 0.0
    probes = np.array([0.1, 0.3j, -0.5 + 0.2j, 0.6 - 0.3j])
    row, col = g.index_of(probes)
    snapped = g.z[row, col]
    for _ in range(20):
        # smooth, compactly supported: a bump times a random polynomial in z, conj(z),
        # whose spectrum decays faster than any power
        c = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        fn = _bump(c)
        h = g.sample(fn)
        scale = float(np.max(np.abs(h)))
        u = cauchy_P(g, h)
        T = beurling_T(g, h)
        r1 = max(r1, float(np.max(np.abs(g.dzbar(u) - h)[inner])) / scale)
        r2 = max(r2, float(np.max(np.abs(g.dz(u) - beurling_multiplier(g, h)))) / scale,
                 float(np.max(np.abs(g.dz(u) - T))) / scale)
        pv = beurling_oracle(fn, snapped, nrho=128, ntheta=512)
        r3 = max(r3, float(np.max(np.abs(T[row, col] - pv))) / scale)
    # T(conj(z)^n chi_D) vanishes in the disk; the PV oracle is exact for the jump
    pv0 = max(float(np.max(np.abs(beurling_oracle(lambda s, n=n: np.conj(s) ** n, probes))))
              for n in range(5))
    # grid values carry Gibbs error from the jump at |z| = 1
    grid0 = max(float(np.max(np.abs(beurling_T(g, g.sample(lambda s, n=n: np.conj(s) ** n))[row, col])))
                for n in range(5))
    dt = time.perf_counter() - t0
    ok = r1 < 1e-6 and r2 < 1e-6 and pv0 < 1e-4 and r3 < 1e-4 and grid0 < 5e-2 and dt < 60
    acceptance(4, ok, f"P_zbar=h {r1:.1e}, P_z=T {r2:.1e}, grid T vs PV {r3:.1e}, "
                      f"T(zbar^n chi)=0 oracle {pv0:.1e} grid {grid0:.1e}, {dt:.2f}s")
    assert ok


def test_second_variation_consistency(acceptance):
    t0 = time.perf_counter()
    W = enneper_family(1, 1.2)
    g1, g2 = PlaneGrid(8.0, 256), PlaneGrid(8.0, 512)
    worst1 = 0.0
    halving = True
    fd_err = 0.0
    for t in range(20):
        ext = BlendedExtension.random(_rng(5, t), W.n).normalized()
        a = identity_P1_P2_check(W, sample_variation(ext, g1), g1)
        b = identity_P1_P2_check(W, sample_variation(ext, g2), g2)
        res_a = max(a.residual1, a.residual2)
        res_b = max(b.residual1, b.residual2)
        worst1 = max(worst1, res_a)
        halving &= res_b <= 0.5 * res_a
        if t < 5:
            inf = nmi_infinitesimal_check(W, sample_variation(ext, g1), g1)
            target = 8.0 * (inf.rhs - inf.lhs)
            fd_err = max(fd_err, abs(second_variation_fd(W, ext) - target) / abs(target))
    dt = time.perf_counter() - t0
    ok = worst1 < 1e-3 and halving and fd_err < 0.02 and dt < 120
    acceptance(5, ok, f"identity residual max {worst1:.1e} at N=256, halves at N=512={halving}, "
                      f"FD vs 8(rhs-lhs) rel {fd_err:.1e}, {dt:.2f}s")
    assert ok


def test_index_estimates(acceptance):
    t0 = time.perf_counter()
    unstable = gram_index(enneper_family(1, 1.2), 6).index
    stable = [gram_index(enneper_family(1, 0.8), M).index for M in (6, 16)]
    planar = [gram_index(from_catalog(name, k, r), M).index
              for name in PLANAR_CATALOG for k in (1, 2) for r in (0.7, 1.0) for M in (6, 16)]
    dt = time.perf_counter() - t0
    ok = unstable >= 1 and not any(stable) and not any(planar) and dt < 10
    acceptance(6, ok, f"index Enneper r=1.2: {unstable}, r=0.8: {max(stable)}, "
                      f"n=2 catalog max {max(planar)} over {len(planar)} cases, {dt:.2f}s")
    assert ok


def test_planar_positivity(acceptance):
    t0 = time.perf_counter()
    surfaces = [from_catalog(name, k, r) for name in PLANAR_CATALOG for k in (1, 2) for r in (0.8, 1.0)]
    disk = DiskGrid(48, 192)
    finite_fail = 0
    for t in range(1000):
        rng = _rng(7, t)
        W = surfaces[t % len(surfaces)]
        ext = BlendedExtension.random(rng, 2)
        mus, _ = equivalent_beltrami_family(ext, disk, rng.uniform(0.05, 0.95))
        finite_fail += not nmi_finite_check(W, mus, disk).holds
    plane = PlaneGrid(8.0, 128)
    inf_fail = 0
    max_eq = 0.0
    for t in range(500):
        W = surfaces[t % len(surfaces)]
        ext = BlendedExtension.random(_rng(8, t), 2).normalized()
        res = nmi_infinitesimal_check(W, sample_variation(ext, plane), plane)
        inf_fail += not res.holds
        max_eq = max(max_eq, res.residuals["equivalence"])
    dt = time.perf_counter() - t0
    ok = finite_fail == 0 and inf_fail == 0 and max_eq < 1e-3 and dt < 120
    acceptance(7, ok, f"n=2 failures finite {finite_fail}/1000, infinitesimal {inf_fail}/500, "
                      f"equivalence <= {max_eq:.1e}, {dt:.2f}s")
    assert ok


def test_schwarz_cross_oracle(acceptance):
    t0 = time.perf_counter()
    hemi = lambda1_cap(CapSpec(math.pi / 2))
    cap = cap_of_disk_image(gauss_map_stereographic(enneper_family(1, 1.2)))
    lam12 = lambda1_cap(cap)
    agree = True
    for r in (0.8, 1.2):
        W = enneper_family(1, r)
        agree &= schwarz_verdict(W).unstable == (gram_index(W, 6).index > 0)
    dt = time.perf_counter() - t0
    ok = abs(hemi - 2) <= 1e-6 and lam12 < 2 and agree and dt < 5
    acceptance(8, ok, f"lambda1 hemisphere {hemi:.10f}, r=1.2 cap {lam12:.6f}, "
                      f"verdicts agree={agree}, {dt:.2f}s")
    assert ok


def test_energy_at_least_area(acceptance):
    t0 = time.perf_counter()
    g = PlaneGrid(8.0, 256)
    surfaces = [from_catalog(name, 1, 1.2 if name == "enneper" else 1.0) for name in sorted(CATALOG)]
    surfaces.append(enneper_family(2, 0.9))
    fails = 0
    gap = math.inf
    for t in range(50):
        W = surfaces[t % len(surfaces)]
        rng = _rng(9, t)
        mu = random_compact_beltrami(rng, g, rng.uniform(0.05, 0.2))
        res = energy_area_after_precomposition(W, mu, g)
        fails += not res.holds
        gap = min(gap, (res.energy - res.area) / res.area)
    dt = time.perf_counter() - t0
    ok = fails == 0 and dt < 120
    acceptance(9, ok, f"energy >= area in {50 - fails}/50 trials, min relative gap {gap:.2e}, {dt:.2f}s")
    assert ok


def test_report_is_deterministic(tmp_path, acceptance):
    t0 = time.perf_counter()
    argv = ["report", "--catalog", "enneper", "--r", "1.2", "--seed", "7", "-q"]
    paths = [tmp_path / "a.json", tmp_path / "b.json", tmp_path / "c.json"]
    codes = [main(argv + ["-o", str(paths[0])]), main(argv + ["-o", str(paths[1])])]
    proc = subprocess.run([sys.executable, "-m", "minstab.cli", *argv, "-o", str(paths[2])],
                          capture_output=True)
    codes.append(proc.returncode)
    blobs = [p.read_bytes() for p in paths]
    same = blobs[0] == blobs[1] == blobs[2]
    doc = json.loads(blobs[0])
    dt = time.perf_counter() - t0
    ok = same and codes == [0, 0, 0] and doc["unstable"] and doc["consistent"]
    acceptance(10, ok, f"3 report runs byte-identical={same} ({len(blobs[0])} bytes), {dt:.2f}s")
    assert ok
