"""Acceptance criteria, one PASS/FAIL line each.

Run with pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

import math

import numpy as np
import pytest
from scipy import special as sp

from inscribed_hilbert import experiments as ex
from inscribed_hilbert import fock_goncharov as fg
from inscribed_hilbert.convex_domains import (ConvexPolygonDomain, DomainError, EllipseDomain, map_domain,
                                              rectangle, square)
from inscribed_hilbert.hilbert import busemann_density, dv_density, hilbert_distance
from inscribed_hilbert.invariants import acd_flags
from inscribed_hilbert.projective import ProjectivePoint, random_projective_map, triple_ratio
from inscribed_hilbert.quadrature import region_area
from inscribed_hilbert.special import comparison_integral_triangle

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # pragma: no cover
    ACCEPTANCE_LINES = []


def report(n: int, name: str, ok: bool, detail: str):
    line = f"ACCEPT {n:>2} {'PASS' if ok else 'FAIL'} {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_01_closed_form_integral():
    errs = []
    for tau in (1.0, 0.5, 0.25, 0.1, 0.01):
        oracle = math.pi**2 / 6 + math.log(tau) ** 2 / 2 + sp.spence(tau)  # spence(t) = Li2(1 - t)
        errs.append(_rel(comparison_integral_triangle(tau), oracle))
    e1 = _rel(comparison_integral_triangle(1.0), math.pi**2 / 6)
    e2 = _rel(comparison_integral_triangle(0.5), math.pi**2 / 4)
    ok = max(errs) <= 1e-6 and e1 <= 1e-8 and e2 <= 1e-8
    report(1, "closed-form integral", ok, f"max_rel={max(errs):.2e} tau=1:{e1:.1e} tau=1/2:{e2:.1e}")


def test_02_rectangle_sandwich():
    xs = np.linspace(-2, 2, 12)[1:-1]
    ys = np.linspace(-1, 1, 12)[1:-1]
    X, Y = np.meshgrid(xs, ys)
    P = np.column_stack([X.ravel(), Y.ravel()])
    dens = busemann_density(rectangle(2.0, 1.0), P)
    dv = dv_density(P[:, 0], P[:, 1], 2.0, 1.0)
    lo, hi = (dens / dv).min(), (dens / dv).max()
    ok = lo >= 0.25 * (1 - 1e-3) and hi <= 0.5 * (1 + 1e-3)
    report(2, "rectangle sandwich", ok, f"density/dV in [{lo:.4f}, {hi:.4f}] vs [1/4, 1/2]")


def test_03_klein_oracle():
    rng = np.random.default_rng(2024)
    disk = EllipseDomain.disk()
    err = 0.0
    for _ in range(100):
        x, y = (rng.uniform(0, 0.98) * np.array([math.cos(t), math.sin(t)]) for t in rng.uniform(0, 2 * math.pi, 2))
        d = x - y
        wedge = x[0] * y[1] - x[1] * y[0]
        oracle = math.atanh(math.sqrt(d @ d - wedge**2) / (1 - x @ y))
        err = max(err, abs(hilbert_distance(disk, x, y) - oracle))
    center = float(busemann_density(disk, np.zeros(2)))
    ok = err <= 1e-8 and abs(center - 1) <= 1e-6
    report(3, "Klein oracle", ok, f"max_abs={err:.2e} density(0)={center:.8f}")


def test_04_ideal_triangles():
    disk = EllipseDomain.disk()
    areas = []
    for angles in ((0.0, 2.1, 4.2), (0.3, 1.0, 3.5), (1.0, 2.0, 5.9)):
        tri = ConvexPolygonDomain.from_points([(math.cos(a), math.sin(a)) for a in angles])
        areas.append(region_area(disk, tri).value)
    spread = max(areas) / min(areas) - 1
    dev = max(abs(a / math.pi - 1) for a in areas)
    ok = spread < 0.02 and dev <= 0.02
    report(4, "ideal triangles", ok, f"areas={', '.join(f'{a:.5f}' for a in areas)} spread={spread:.1e}")


def test_05_dictionary():
    rng = np.random.default_rng(5)
    rt = 0.0
    for W, Z in np.exp(rng.uniform(math.log(1e-6), math.log(1e6), (1000, 2))):
        w, z = fg.wz_from_d(fg.d_from_wz(W, Z))
        rt = max(rt, _rel(w, W), _rel(z, Z))
    ye = 0.0
    for W, Z, Y in np.exp(rng.uniform(-4.6, 4.6, (1000, 3))):
        mu, nu = fg.d_from_wz(W, Z)
        m = fg.m_from_y(mu, nu, Y)
        ye = max(ye, _rel(fg.y_invariant(mu, nu, m), triple_ratio(*acd_flags(mu, nu, m))))
    inv = 0.0
    for W, Z, T, Y in np.exp(rng.uniform(-4.6, 4.6, (200, 4))):
        p = fg.QuadParams(W, Z, T, Y)
        r, rr = fg.reflect(p), fg.reflect(fg.reflect(p))
        inv = max(inv, *(_rel(getattr(rr, k), getattr(p, k)) for k in "WZTY"), abs(r.Y * p.Y - 1))
    ok = rt <= 1e-12 and ye <= 1e-10 and inv <= 1e-12
    report(5, "dictionary", ok, f"roundtrip={rt:.1e} y_oracle={ye:.1e} involution={inv:.1e}")


def test_06_triangle_growth_law():
    Ts = [1e-3, 1e-2, 1e-1, 1.0]
    rows = ex.run_triangle_table(Ts + [1 / T for T in Ts[:-1]])
    ratios = [r.ratio for r in rows[:4]]
    band = max(ratios) / min(ratios)
    pairs = [(rows[i].area, rows[4 + i].area) for i in range(3)]
    worst = max(abs(a.value - b.value) / (2 * (a.error_estimate + b.error_estimate)) for a, b in pairs)
    ok = band <= 10 and worst <= 1 and all(r.area.converged for r in rows)
    report(6, "triangle growth law", ok, f"ratio band={band:.2f} reciprocal gap/(2 err)={worst:.2f}")


@pytest.fixture(scope="module")
def constant_paths():
    return {c: ex.run_degeneration(ex.DegenerationPath.graph("constant", c)) for c in (0.0, 1.0, 4.0)}


def test_07_comparability(constant_paths):
    means = [constant_paths[c].summary.tail_mean_area for c in (0.0, 1.0, 4.0)]
    bands = [constant_paths[c].summary.ratio_band for c in (0.0, 1.0, 4.0)]
    power = ex.DegenerationPath("graph", 15, (1e-6, 1e-2), ex.GSpec("power", 0.5))
    areas = [r.area.value for r in ex.run_degeneration(power).records if r.usable]
    pband = max(areas) / min(areas)
    ok = means[0] < means[1] < means[2] and max(bands) <= 10 and pband <= 2 and len(areas) == 15
    report(7, "comparability", ok,
           f"tail means={', '.join(f'{m:.3f}' for m in means)} ratio bands<={max(bands):.3f} power band={pband:.3f}")


def test_08_divergence_near_line_a(constant_paths):
    plateau = constant_paths[0.0].summary.tail_mean_area
    case = fg.classify_degeneration("inf", "+", "inf")
    sweep = ex.run_case_sweep(case, n=20, spacing="linear", sequence=lambda k: (1.0, k))
    last = sweep.run.records[-1]
    flagged = sweep.run.summary.divergence_flagged
    ok = flagged or last.area.value > 10 * plateau
    report(8, "divergence near line a", ok,
           f"flag={flagged} area(k=20)={last.area.value:.3f} vs 10x plateau={10 * plateau:.3f}")


def test_09_bulge_counterexample():
    run, v = ex.run_bulge_counterexample(16)
    ok = abs(v.v_final - 4.0) <= 1e-12 and v.v_monotone and v.area_band <= 4
    report(9, "bulge counterexample", ok, f"v_final={v.v_final:.12g} area band={v.area_band:.4f}")


def test_10_projective_invariance():
    conf = fg.build_configuration(fg.QuadParams(1.0, 1.0, 1.0, 0.25))
    base = region_area(conf.outer, conf.inner)
    rng = np.random.default_rng(10)
    devs = []
    while len(devs) < 10:
        g = random_projective_map(rng)
        try:
            outer = map_domain(conf.outer, g)
            inner = ConvexPolygonDomain.from_points(
                [g(ProjectivePoint.affine(*v)).to_affine() for v in conf.inner.vertices])
        except (DomainError, ValueError):
            continue  # image not bounded in this chart
        devs.append(_rel(region_area(outer, inner).value, base.value))
    ok = max(devs) <= 1e-3
    report(10, "projective invariance", ok, f"area={base.value:.6f} max_rel_dev={max(devs):.1e} over 10 maps")


def test_11_comparison_principle():
    tri = ConvexPolygonDomain.from_points([(-1.0, -1.0), (1.0, 0.0), (0.0, 1.0)])
    small, big = square(1.0), square(2.0)
    a_small, a_big = region_area(small, tri).value, region_area(big, tri).value
    rng = np.random.default_rng(11)
    worst = -math.inf
    for x, y in rng.uniform(-0.99, 0.99, (100, 2, 2)):
        worst = max(worst, hilbert_distance(big, x, y) - hilbert_distance(small, x, y))
    ok = math.isfinite(a_small) and a_big < a_small and worst < 0
    report(11, "comparison principle", ok, f"area {a_small:.3f} -> {a_big:.3f}, max d_big-d_small={worst:.2e}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider", "-s"]))
