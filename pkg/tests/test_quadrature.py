import math

import numpy as np
import pytest
from scipy import integrate

from inscribed_hilbert.convex_domains import ConvexPolygonDomain, DomainError, EllipseDomain, square
from inscribed_hilbert.hilbert import QuadratureConfig, dv_density, klein_density
from inscribed_hilbert.projective import random_projective_map
from inscribed_hilbert.quadrature import region_area
from inscribed_hilbert.special import key_integral_closed_form

DISK = EllipseDomain.disk()


def poly(*pts):
    return ConvexPolygonDomain.from_points(pts)


def on_circle(*angles):
    return poly(*[(math.cos(a), math.sin(a)) for a in angles])


@pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-3])
def test_tiny_square_at_center(eps):
    r = region_area(DISK, square(eps))
    assert r.converged
    assert r.value == pytest.approx(4 * eps**2, rel=2 * eps**2 + 1e-4)


def test_disk_triangle_against_dblquad():
    tri = [(-0.5, -0.4), (0.7, -0.2), (0.1, 0.8)]
    r = region_area(DISK, poly(*tri), QuadratureConfig(rel_tol=1e-7))

    def upper(x):
        (x0, y0), (x1, y1), (x2, y2) = tri
        return y0 + (y2 - y0) * (x - x0) / (x2 - x0) if x <= x2 else y2 + (y1 - y2) * (x - x2) / (x1 - x2)

    lower = lambda x: tri[0][1] + (tri[1][1] - tri[0][1]) * (x - tri[0][0]) / (tri[1][0] - tri[0][0])  # noqa: E731
    val, _ = integrate.dblquad(lambda y, x: klein_density(np.array([x, y])), tri[0][0], tri[1][0],
                               lower, upper, epsabs=0, epsrel=1e-10)
    assert r.value == pytest.approx(val, rel=1e-6)
    assert abs(r.value - val) <= 3 * r.error_estimate + 1e-9


@pytest.mark.parametrize("angles", [(0, 2 * math.pi / 3, 4 * math.pi / 3), (0.1, 1.4, 4.0), (0.3, 2.0, 2.6)])
def test_ideal_triangles_have_area_pi(angles):
    r = region_area(DISK, on_circle(*angles))
    assert r.converged and not r.divergent
    assert r.value == pytest.approx(math.pi, rel=1e-3)


def test_ideal_quadrilateral_has_area_2pi():
    r = region_area(DISK, on_circle(0.0, 1.0, 3.0, 4.5))
    assert r.value == pytest.approx(2 * math.pi, rel=1e-3)


def test_triangle_chart_sandwich():
    # the triangle (1,0), (1,1), (0,1) in (0,2)^2, against 1/4 and 1/2 of the rectangle density
    dom = ConvexPolygonDomain([(0, 0), (2, 0), (2, 2), (0, 2)])
    r = region_area(dom, poly((1, 0), (1, 1), (0, 1)))
    dv, _ = integrate.dblquad(lambda y, x: dv_density(x - 1, y - 1, 1.0, 1.0), 0, 1,
                              lambda x: 1 - x, lambda x: 1.0, epsabs=0, epsrel=1e-9)
    assert 0.25 * dv <= r.value <= 0.5 * dv
    assert r.value >= math.pi / 16 * key_integral_closed_form(1.0)


def test_comparison_principle_nested_squares():
    tri = poly((0.5, 0.0), (1.0, 1.0), (0.0, 0.75))
    small = ConvexPolygonDomain([(0, 0), (1, 0), (1, 1), (0, 1)])
    big = square(1.0, (0.5, 0.5))
    a, b = region_area(small, tri), region_area(big, tri)
    assert b.value < a.value


def test_comparison_principle_circumscribed_ellipse():
    sq = square(1.0)
    ell = EllipseDomain((0, 0), np.eye(2) / 2.0)  # radius sqrt(2) through the corners
    tri = poly((-0.9, -0.9), (0.9, -0.5), (0.0, 0.9))
    assert region_area(ell, tri).value < region_area(sq, tri).value


def test_edge_on_boundary_is_divergent():
    sq = ConvexPolygonDomain([(0, 0), (1, 0), (1, 1), (0, 1)])
    r = region_area(sq, poly((0, 0), (1, 0), (0.5, 0.5)))
    assert math.isinf(r.value) and r.divergent and not r.converged


def test_region_vertex_at_domain_corner_is_divergent():
    sq = ConvexPolygonDomain([(0, 0), (1, 0), (1, 1), (0, 1)])
    r = region_area(sq, poly((0, 0), (0.6, 0.3), (0.3, 0.6)), QuadratureConfig(max_evaluations=50_000))
    assert r.divergent and not r.converged
    assert all(min(rs) >= 0.9 for rs in r.corner_ratios.values())


def test_integrable_corners_are_not_divergent():
    sq = ConvexPolygonDomain([(0, 0), (1, 0), (1, 1), (0, 1)])
    r = region_area(sq, poly((0, 0.5), (0.5, 0), (1, 0.5), (0.5, 1)))
    assert r.converged and not r.divergent


def test_region_must_be_inscribed():
    with pytest.raises(DomainError):
        region_area(DISK, square(1.0))
    with pytest.raises(TypeError):
        region_area(DISK, DISK)


def test_projective_invariance():
    outer = poly((0, 0), (3, 0), (3.5, 2), (0.5, 3))
    inner = poly((1.5, 0), (3.25, 1), (2, 2.5), (0.25, 1.5))
    ref = region_area(outer, inner)
    rng = np.random.default_rng(9)
    done = 0
    while done < 5:
        g = random_projective_map(rng, 0.15)
        try:
            o, i = outer.apply_map(g), inner.apply_map(g)
        except DomainError:
            continue
        r = region_area(o, i)
        assert r.value == pytest.approx(ref.value, rel=max(1e-3, 3 * r.error_estimate / r.value))
        done += 1


def test_deterministic_and_serializable():
    tri = on_circle(0.1, 1.4, 4.0)
    a, b = region_area(DISK, tri), region_area(DISK, tri)
    assert a.value == b.value and a.evaluations == b.evaluations
    assert set(a.to_dict()) >= {"value", "error_estimate", "evaluations", "converged"}
    assert a.value >= 0 and a.error_estimate >= 0
