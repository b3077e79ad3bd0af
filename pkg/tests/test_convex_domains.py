import json

import numpy as np
import pytest

from inscribed_hilbert import fock_goncharov as fg
from inscribed_hilbert.convex_domains import (ConvexDomain, ConvexPolygonDomain, DomainError,
                                              EllipseDomain, boundary_vertices, chord, contains,
                                              inscribe_check, map_domain, square)
from inscribed_hilbert.projective import ProjectiveMap

UNIT_SQUARE = ConvexPolygonDomain([(0, 0), (1, 0), (1, 1), (0, 1)])
TRI = ConvexPolygonDomain([(0, 0), (1, 0), (0, 1)])


def test_contains_examples():
    sq = square(1.0)
    assert contains(sq, (0, 0))
    assert not contains(sq, (2, 0))
    assert contains(TRI, (0.25, 0.25))
    assert not contains(TRI, (0.5, 0.5))  # on the boundary
    assert list(contains(TRI, [(0.1, 0.1), (1, 1)])) == [True, False]


def test_polygon_validation():
    with pytest.raises(DomainError):
        ConvexPolygonDomain([(0, 0), (1, 0)])
    with pytest.raises(DomainError):
        ConvexPolygonDomain([(0, 0), (1, 0), (1, 0), (0, 1)])
    with pytest.raises(DomainError):
        ConvexPolygonDomain([(0, 0), (0, 1), (1, 0)])  # clockwise
    with pytest.raises(DomainError):
        ConvexPolygonDomain([(0, 0), (1, 0), (2, 0), (0, 1)])  # collinear triple
    with pytest.raises(DomainError):
        ConvexPolygonDomain([(0, 0), (2, 0), (0.5, 0.5), (0, 2)])  # reflex vertex
    assert ConvexPolygonDomain.from_points([(0, 0), (0, 1), (1, 0)]).n == 3


def test_ellipse_validation():
    with pytest.raises(DomainError):
        EllipseDomain((0, 0), [[1, 0], [0, -1]])
    with pytest.raises(DomainError):
        EllipseDomain((0, 0), [[1, 0.5], [0.1, 1]])


@pytest.mark.parametrize("dom, x, v, p, q", [
    (EllipseDomain.disk(), (0, 0), (1, 0), (-1, 0), (1, 0)),
    (square(1.0), (0, 0), (1, 1), (-1, -1), (1, 1)),
    (square(1.0), (0.5, 0), (1, 0), (-1, 0), (1, 0)),
])
def test_chord_examples(dom, x, v, p, q):
    c = chord(dom, x, v)
    assert np.allclose(c.p, p, atol=1e-14) and np.allclose(c.q, q, atol=1e-14)


def test_chord_errors():
    with pytest.raises(DomainError):
        chord(square(1.0), (2, 0), (1, 0))
    with pytest.raises(DomainError):
        chord(square(1.0), (0, 0), (0, 0))


def _random_domains(rng):
    pts = rng.standard_normal((12, 2))
    ang = np.sort(rng.uniform(0, 2 * np.pi, 7))
    poly = ConvexPolygonDomain(np.column_stack([np.cos(ang), 0.6 * np.sin(ang)]) * 2 + 0.3)
    A = rng.standard_normal((2, 2))
    ell = EllipseDomain((0.2, -0.1), A @ A.T + 0.5 * np.eye(2))
    return [poly, ell], pts


def test_chord_properties():
    rng = np.random.default_rng(7)
    for _ in range(20):
        doms, _ = _random_domains(rng)
        for dom in doms:
            x = dom.vertices.mean(axis=0) if isinstance(dom, ConvexPolygonDomain) else dom.center
            for v in rng.standard_normal((10, 2)):
                c = chord(dom, x, v)
                # endpoints on the boundary and on the line x + t v
                assert abs(float(dom.boundary_margin(c.p))) < 1e-9
                assert abs(float(dom.boundary_margin(c.q))) < 1e-9
                for e in (c.p, c.q):
                    d = e - x
                    assert abs(d[0] * v[1] - d[1] * v[0]) < 1e-9 * np.linalg.norm(v) * (1 + np.linalg.norm(d))
                assert (c.q - x) @ v > 0 > (c.p - x) @ v
                r = chord(dom, x, -v)
                assert np.allclose(r.p, c.q) and np.allclose(r.q, c.p)


def test_chord_affine_covariance():
    rng = np.random.default_rng(8)
    for _ in range(10):
        doms, _ = _random_domains(rng)
        M = np.eye(3)
        M[:2, :2] = rng.standard_normal((2, 2)) + 2 * np.eye(2)
        M[:2, 2] = rng.standard_normal(2)
        g = ProjectiveMap(M)
        for dom in doms:
            x = dom.vertices.mean(axis=0) if isinstance(dom, ConvexPolygonDomain) else dom.center
            v = rng.standard_normal(2)
            img = map_domain(dom, g)
            c = chord(dom, x, v)
            c2 = chord(img, M[:2, :2] @ x + M[:2, 2], M[:2, :2] @ v)
            assert np.allclose(M[:2, :2] @ c.p + M[:2, 2], c2.p, atol=1e-9)
            assert np.allclose(M[:2, :2] @ c.q + M[:2, 2], c2.q, atol=1e-9)


def test_inscribe_check_examples():
    mid = ConvexPolygonDomain.from_points([(0.5, 0), (1, 0.5), (0, 0.5)])
    assert inscribe_check(UNIT_SQUARE, mid)
    out = ConvexPolygonDomain.from_points([(0.5, 0), (1.2, 0.5), (0, 0.5)])
    assert not inscribe_check(UNIT_SQUARE, out)
    along = ConvexPolygonDomain.from_points([(0, 0), (1, 0), (0.5, 0.5)])
    assert not inscribe_check(UNIT_SQUARE, along)  # an edge runs along the boundary
    conf = fg.build_configuration(fg.QuadParams(1.0, 1.0, 1.0, 0.25))
    assert inscribe_check(conf.outer, conf.inner)
    assert boundary_vertices(conf.outer, conf.inner).all()


def test_disk_inscribed_triangle():
    t = np.array([0.0, 2.0, 4.0])
    tri = ConvexPolygonDomain.from_points(np.column_stack([np.cos(t), np.sin(t)]))
    assert inscribe_check(EllipseDomain.disk(), tri)


def test_json_roundtrip():
    for dom in (UNIT_SQUARE, EllipseDomain((1, 2), [[2, 0.3], [0.3, 1]])):
        back = ConvexDomain.from_dict(json.loads(json.dumps(dom.to_dict())))
        assert back.to_dict() == dom.to_dict()
    with pytest.raises(DomainError):
        ConvexDomain.from_dict({"type": "blob"})


def test_projective_image_must_stay_bounded():
    g = ProjectiveMap([[1, 0, 0], [0, 1, 0], [1, 0, -0.5]])  # sends x = 0.5 to infinity
    with pytest.raises(DomainError):
        map_domain(UNIT_SQUARE, g)
