import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from inscribed_hilbert.fock_goncharov import triangle_flags, triangle_invariant
from inscribed_hilbert.projective import (DegenerateInputError, Flag, PreconditionError,
                                          ProjectiveLine, ProjectiveMap, ProjectivePoint,
                                          cross_ratio_collinear, cross_ratio_concurrent, join,
                                          map_four_points, meet, normalize_quadrilateral,
                                          random_projective_map, triple_ratio)

P = ProjectivePoint
L = ProjectiveLine


def on_x_axis(*ts):
    return [P.affine(t, 0.0) for t in ts]


def test_point_equality_is_projective():
    assert P((1, 2, 3)) == P((-2, -4, -6))
    assert P((1, 2, 3)) != P((1, 2, 4))
    with pytest.raises(DegenerateInputError):
        P((0, 0, 0))


@pytest.mark.parametrize("p, q, line", [
    ((0, 0, 1), (1, 0, 1), (0, 1, 0)),
    ((0, 0, 1), (1, 1, 1), (1, -1, 0)),
    ((0, 2, 1), (-1, 1, 1), (1, -1, 2)),
])
def test_join_examples(p, q, line):
    assert join(P(p), P(q)) == L(line)


def test_join_coincident_points():
    with pytest.raises(DegenerateInputError):
        join(P((1, 2, 1)), P((2, 4, 2)))


def test_meet_examples():
    assert meet(L((1, 1, 0)), L((1, -1, 2))).isclose(P((-1, 1, 1)))
    assert meet(L((1, 0, 0)), L((0, 1, 0))).isclose(P((0, 0, 1)))
    W = Z = 1.0
    ad = L.from_slope(-2 / Z - 1, (0.0, 0.0))
    cd = L.from_slope(2 * W + 1, (0.0, 2.0))
    assert np.allclose(meet(ad, cd).to_affine(), [-1 / 3, 1], atol=1e-14)
    with pytest.raises(DegenerateInputError):
        meet(L((1, 2, 3)), L((2, 4, 6)))


def test_join_meet_duality():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p, q, r = (P(v) for v in rng.standard_normal((3, 3)))
        assert meet(join(p, q), join(p, r)).isclose(p, 1e-9)


@pytest.mark.parametrize("t4, expected", [(0.0, 0.0), (1.0, -1.0), (-1.0, 0.5)])
def test_cross_ratio_examples(t4, expected):
    assert cross_ratio_collinear(*on_x_axis(3, 1, 0, t4)) == pytest.approx(expected, abs=1e-14)


def test_cross_ratio_infinite_at_x1():
    assert math.isinf(cross_ratio_collinear(*on_x_axis(3, 1, 0, 3)))


def test_cross_ratio_rejects_non_collinear():
    with pytest.raises(PreconditionError):
        cross_ratio_collinear(P.affine(0, 0), P.affine(1, 0), P.affine(2, 0), P.affine(0, 1))


def _lines_through_origin(params):
    # line through the origin and (t, 1): hits the reference line y=1 at x=t
    return [L((1.0, -t, 0.0)) if math.isfinite(t) else L((0.0, 1.0, 0.0)) for t in params]


@pytest.mark.parametrize("omega, Z", [(-3.0, 1.0), (-2.0, 2.0)])
def test_cross_ratio_concurrent_edge_parameter(omega, Z):
    lines = _lines_through_origin((-1.0, 1.0, 0.0, 1.0 / omega))
    assert cross_ratio_concurrent(*lines) == pytest.approx(-2.0 / (omega + 1.0), rel=1e-12)
    assert cross_ratio_concurrent(*lines) == pytest.approx(Z, rel=1e-12)


def test_cross_ratio_concurrent_independent_of_reference():
    rng = np.random.default_rng(0)
    lines = _lines_through_origin(rng.uniform(-3, 3, 4))
    ref_pts = []
    for ref in (L((0.3, 1.0, -1.0)), L((1.0, -0.2, 2.0))):
        ref_pts.append(cross_ratio_collinear(*(meet(l, ref) for l in lines)))
    assert ref_pts[0] == pytest.approx(ref_pts[1], rel=1e-10)
    assert cross_ratio_concurrent(*lines) == pytest.approx(ref_pts[0], rel=1e-10)


def test_cross_ratio_concurrent_rejects_general_lines():
    with pytest.raises(PreconditionError):
        cross_ratio_concurrent(L((1, 0, 0)), L((0, 1, 0)), L((1, 1, -1)), L((1, -1, 3)))


@pytest.mark.parametrize("t, T", [((0.5, 0.5, 0.5), 1.0), ((0.5, 0.5, 2 / 3), 2.0)])
def test_triple_ratio_chart_examples(t, T):
    assert triple_ratio(*triangle_flags(*t)) == pytest.approx(T, rel=1e-12)


def test_triple_ratio_reference_quadrilateral():
    mu, nu, m = -1 / 3, 1.0, -5.0
    fa = Flag(P.affine(0, 0), L((1, 1, 0)))
    fc = Flag(P.affine(0, 2), L((1, -1, 2)))
    fd = Flag(P.affine(mu, nu), L.from_slope(m, (mu, nu)))
    oracle = (2 - nu + mu) * (nu - mu * m) / ((nu + mu) * (-2 + nu - mu * m))
    assert triple_ratio(fa, fc, fd) == pytest.approx(oracle, rel=1e-12)
    assert oracle == pytest.approx(0.25, rel=1e-14)


def test_triple_ratio_degenerate():
    fa, fb, fc = triangle_flags(0.5, 0.5, 0.5)
    moved = Flag(P.affine(0.0, 0.0), fa.line)  # flag point at the corner a^c
    with pytest.raises(DegenerateInputError):
        triple_ratio(moved, fb, fc)


ts = st.floats(0.02, 0.98)


@settings(max_examples=200, deadline=None)
@given(ts, ts, ts)
def test_triple_ratio_matches_chart_product(a, b, c):
    assert triple_ratio(*triangle_flags(a, b, c)) == pytest.approx(triangle_invariant(a, b, c), rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(ts, ts, ts)
def test_triple_ratio_reversal_is_reciprocal(a, b, c):
    fa, fb, fc = triangle_flags(a, b, c)
    assert triple_ratio(fc, fb, fa) == pytest.approx(1.0 / triple_ratio(fa, fb, fc), rel=1e-9)


def test_triple_ratio_sign_counts_outside_points():
    # one flag point outside its segment: negative; two: positive; three: negative
    assert triple_ratio(*triangle_flags(1.5, 0.5, 0.5)) < 0
    assert triple_ratio(*triangle_flags(1.5, 1.5, 0.5)) > 0
    assert triple_ratio(*triangle_flags(1.5, 1.5, -0.5)) < 0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_projective_invariance(seed):
    rng = np.random.default_rng(seed)
    g = random_projective_map(rng)
    if abs(np.linalg.det(g.matrix)) < 1e-3:
        return
    pts = on_x_axis(*np.sort(rng.uniform(-2, 2, 4)))
    if any(abs(g(p).coords[2]) < 1e-6 for p in pts):
        return
    cr = cross_ratio_collinear(*pts)
    assert cross_ratio_collinear(*(g(p) for p in pts), tol=1e-8) == pytest.approx(cr, rel=1e-9)
    flags = triangle_flags(*rng.uniform(0.1, 0.9, 3))
    moved = [Flag(g(f.point), g(f.line), tol=1e-8) for f in flags]
    assert triple_ratio(*moved) == pytest.approx(triple_ratio(*flags), rel=1e-9)


def test_map_preserves_incidence_and_inverts():
    rng = np.random.default_rng(5)
    g = random_projective_map(rng)
    p, q = P(rng.standard_normal(3)), P(rng.standard_normal(3))
    line = join(p, q)
    assert g(line).incident(g(p)) and g(line).incident(g(q))
    assert g.compose(g.inverse()).isclose(ProjectiveMap.identity())
    with pytest.raises(DegenerateInputError):
        ProjectiveMap(np.ones((3, 3)))


def test_map_four_points():
    frame = [P((1, 0, 0)), P((0, 1, 0)), P((0, 0, 1)), P((1, 1, 1))]
    assert map_four_points(frame, frame).isclose(ProjectiveMap.identity())
    cyc = frame[1:3] + frame[:1] + frame[3:]
    g = map_four_points(frame, cyc)
    for s, d in zip(frame, cyc):
        assert g(s).isclose(d)
    rng = np.random.default_rng(11)
    src = [P(v) for v in rng.standard_normal((4, 3))]
    dst = [P(v) for v in rng.standard_normal((4, 3))]
    g = map_four_points(src, dst)
    for s, d in zip(src, dst):
        assert g(s).isclose(d, 1e-9)
    with pytest.raises(PreconditionError):
        map_four_points(frame[:2] + [P((1, 1, 0)), frame[3]], frame)


def _normal_flags():
    A, B, C = P.affine(0, 0), P.affine(1, 1), P.affine(0, 2)
    return Flag(A, L((1, 1, 0))), Flag(B, L((1, 0, -1))), Flag(C, L((1, -1, 2)))


def test_normalize_already_normal():
    assert normalize_quadrilateral(*_normal_flags()).isclose(ProjectiveMap.identity())


def test_normalize_after_random_map():
    rng = np.random.default_rng(2)
    fa, fb, fc = _normal_flags()
    D = P.affine(-1 / 3, 1)
    for _ in range(10):
        g = random_projective_map(rng)
        moved = [g(f) for f in (fa, fb, fc)]
        h = normalize_quadrilateral(*moved)
        for f, target in zip(moved, [(0, 0), (1, 1), (0, 2)]):
            assert np.allclose(h(f.point).to_affine(), target, atol=1e-9)
        assert np.allclose(h(meet(moved[0].line, moved[2].line)).to_affine(), (-1, 1), atol=1e-9)
        assert np.allclose(h(g(D)).to_affine(), (-1 / 3, 1), atol=1e-9)


def test_flag_requires_incidence():
    with pytest.raises(PreconditionError):
        Flag(P.affine(1, 1), L((1, 1, 0)))
