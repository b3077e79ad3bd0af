"""Strictly convex planar domains in a fixed affine chart.

Two kinds are supported: convex polygons, stored as an intersection of
half-planes ``n_i . x < c_i`` with unit outward normals, and ellipses
``(x - center)^T M (x - center) < 1``.  All point queries are vectorized
over leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .projective import DegenerateInputError, PreconditionError, ProjectiveMap

DOMAIN_TOL = 1e-15  # minimal sine of the turn angle at a vertex


class DomainError(ValueError):
    """Invalid domain data or a query outside the domain."""


@dataclass(frozen=True)
class Chord:
    """The two boundary points of a line through an interior point.

    ``p`` is hit going in direction ``-v`` and ``q`` going in direction ``+v``.
    """

    p: np.ndarray
    q: np.ndarray


def _as_points(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


class ConvexDomain:
    """Interface shared by polygons and ellipses."""

    kind = "abstract"

    def contains(self, x, tol: float = 0.0):
        """Strict interior test with margin ``tol`` (vectorized)."""
        raise NotImplementedError

    def chord_params(self, x, v):
        """Return ``(t_minus, t_plus)`` with boundary hits at ``x + t v``."""
        raise NotImplementedError

    def boundary_margin(self, x):
        raise NotImplementedError

    def chord(self, x, v) -> Chord:
        x = _as_points(x)
        v = _as_points(v)
        if x.shape != (2,) or v.shape != (2,):
            raise DomainError("chord() takes a single point and direction")
        if not np.any(v):
            raise DomainError("chord direction must be nonzero")
        if not self.contains(x):
            raise DomainError(f"chord base point {x} is not interior")
        tm, tp = self.chord_params(x, v)
        return Chord(x + float(tm) * v, x + float(tp) * v)

    def on_boundary(self, x, tol: float = 1e-9) -> bool:
        return bool(abs(float(self.boundary_margin(x))) <= tol * max(1.0, self.scale))

    def apply_map(self, g: ProjectiveMap) -> "ConvexDomain":
        raise NotImplementedError

    @property
    def scale(self) -> float:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_dict(d: dict) -> "ConvexDomain":
        kind = d.get("type")
        if kind == "polygon":
            return ConvexPolygonDomain(d["vertices"])
        if kind == "ellipse":
            return EllipseDomain(d["center"], d["shape"])
        raise DomainError(f"unknown domain type {kind!r}")


class ConvexPolygonDomain(ConvexDomain):
    """Strictly convex polygon with vertices in counterclockwise order."""

    kind = "polygon"

    def __init__(self, vertices, tol: float = DOMAIN_TOL):
        V = np.array(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 2 or len(V) < 3:
            raise DomainError("a polygon needs at least 3 vertices given as (x, y) pairs")
        if not np.all(np.isfinite(V)):
            raise DomainError("polygon vertices must be finite")
        E = np.roll(V, -1, axis=0) - V
        lengths = np.hypot(E[:, 0], E[:, 1])
        size = float(np.max(np.abs(V - V.mean(axis=0)))) or 1.0
        mag = np.maximum(np.max(np.abs(V), axis=1), np.max(np.abs(np.roll(V, -1, axis=0)), axis=1))
        if np.any(lengths <= 4.0 * np.finfo(float).eps * mag):
            raise DomainError("polygon has repeated vertices")
        turn = E[:, 0] * np.roll(E, -1, axis=0)[:, 1] - E[:, 1] * np.roll(E, -1, axis=0)[:, 0]
        sine = turn / (lengths * np.roll(lengths, -1))
        if np.any(sine <= tol):
            bad = int(np.argmin(sine))
            raise DomainError(
                f"polygon is not strictly convex and counterclockwise at vertex {(bad + 1) % len(V)}")
        self.vertices = V
        self.vertices.setflags(write=False)
        N = np.column_stack([E[:, 1], -E[:, 0]]) / lengths[:, None]
        self.normals = N
        self.offsets = np.einsum("ij,ij->i", N, V)
        self._size = size

    @classmethod
    def from_points(cls, points, tol: float = DOMAIN_TOL) -> "ConvexPolygonDomain":
        """Build from vertices given in either cyclic orientation."""
        P = np.array(points, dtype=float)
        area2 = np.sum(P[:, 0] * np.roll(P[:, 1], -1) - np.roll(P[:, 0], -1) * P[:, 1])
        if area2 < 0:
            P = P[::-1]
        return cls(P, tol)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def scale(self) -> float:
        return self._size

    def lebesgue_area(self) -> float:
        V = self.vertices
        return 0.5 * float(np.sum(V[:, 0] * np.roll(V[:, 1], -1) - np.roll(V[:, 0], -1) * V[:, 1]))

    def edge_distances(self, x) -> np.ndarray:
        """Signed distances ``c_i - n_i . x`` to every edge line, shape (..., n)."""
        return self.offsets - _as_points(x) @ self.normals.T

    def boundary_margin(self, x):
        return np.min(self.edge_distances(x), axis=-1)

    def contains(self, x, tol: float = 0.0):
        m = self.boundary_margin(x)
        return bool(m > tol) if np.ndim(m) == 0 else m > tol

    def chord_params(self, x, v):
        x = _as_points(x)
        v = _as_points(v)
        h = self.edge_distances(x)
        nv = v @ self.normals.T
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            t = h / nv
        t_plus = np.min(np.where(nv > 0, t, np.inf), axis=-1)
        t_minus = np.max(np.where(nv < 0, t, -np.inf), axis=-1)
        return t_minus, t_plus

    def gauge_vectors(self, x) -> np.ndarray:
        """Vectors ``n_i / h_i`` whose maximal pairing with v is the gauge of v at x."""
        h = self.edge_distances(x)
        return self.normals / h[..., None]

    def apply_map(self, g: ProjectiveMap) -> "ConvexPolygonDomain":
        h = np.column_stack([self.vertices, np.ones(self.n)]) @ g.matrix.T
        w = h[:, 2]
        if not (np.all(w > 0) or np.all(w < 0)):
            raise DomainError("projective map sends part of the polygon to infinity")
        return ConvexPolygonDomain.from_points(h[:, :2] / w[:, None])

    def to_dict(self) -> dict:
        return {"type": "polygon", "vertices": self.vertices.tolist()}

    def __repr__(self):
        return f"ConvexPolygonDomain({self.vertices.tolist()})"


class EllipseDomain(ConvexDomain):
    """Open ellipse {p : (p - center)^T M (p - center) < 1}."""

    kind = "ellipse"

    def __init__(self, center, shape, tol: float = DOMAIN_TOL):
        c = np.array(center, dtype=float).reshape(2)
        M = np.array(shape, dtype=float).reshape(2, 2)
        if abs(M[0, 1] - M[1, 0]) > tol * max(1.0, np.abs(M).max()):
            raise DomainError("ellipse shape matrix must be symmetric")
        M = 0.5 * (M + M.T)
        ev = np.linalg.eigvalsh(M)
        if ev[0] <= 0:
            raise DomainError("ellipse shape matrix must be positive definite")
        self.center = c
        self.shape = M
        self._size = float(1.0 / np.sqrt(ev[0]))

    @classmethod
    def disk(cls, radius: float = 1.0, center=(0.0, 0.0)) -> "EllipseDomain":
        return cls(center, np.eye(2) / radius**2)

    @property
    def scale(self) -> float:
        return self._size

    def slack(self, x):
        """``1 - q(x)``; positive inside."""
        w = _as_points(x) - self.center
        return 1.0 - np.einsum("...i,ij,...j->...", w, self.shape, w)

    def boundary_margin(self, x):
        # first-order distance to the boundary; exact sign
        s = self.slack(x)
        w = _as_points(x) - self.center
        grad = 2.0 * np.linalg.norm(w @ self.shape, axis=-1)
        return s / np.maximum(grad, 2.0 * np.sqrt(np.linalg.eigvalsh(self.shape)[0]))

    def contains(self, x, tol: float = 0.0):
        m = self.boundary_margin(x)
        return bool(m > tol) if np.ndim(m) == 0 else m > tol

    def chord_params(self, x, v):
        x = _as_points(x)
        v = _as_points(v)
        w = x - self.center
        a = np.einsum("...i,ij,...j->...", v, self.shape, v)
        b = np.einsum("...i,ij,...j->...", v, self.shape, w)
        slack = self.slack(x)
        sq = np.sqrt(b * b + a * slack)
        # roots of a t^2 + 2 b t - slack = 0 without cancellation
        big = np.where(b >= 0, -b - sq, -b + sq)
        other = -slack / big
        t_big = big / a
        t_minus = np.where(b >= 0, t_big, other)
        t_plus = np.where(b >= 0, other, t_big)
        return t_minus, t_plus

    def apply_map(self, g: ProjectiveMap) -> "EllipseDomain":
        M, c = self.shape, self.center
        Mc = M @ c
        conic = np.block([[M, -Mc[:, None]], [-Mc[None, :], np.array([[c @ Mc - 1.0]])]])
        Hi = np.linalg.inv(g.matrix)
        C2 = Hi.T @ conic @ Hi
        A2, b2, e2 = C2[:2, :2], C2[:2, 2], C2[2, 2]
        if np.linalg.eigvalsh(0.5 * (A2 + A2.T))[0] <= 0:
            raise DomainError("projective image of the ellipse is unbounded in this chart")
        c2 = -np.linalg.solve(A2, b2)
        k = c2 @ A2 @ c2 - e2
        if k <= 0:
            raise DomainError("projective image of the ellipse is empty")
        return EllipseDomain(c2, A2 / k)

    def to_dict(self) -> dict:
        return {"type": "ellipse", "center": self.center.tolist(), "shape": self.shape.tolist()}

    def __repr__(self):
        return f"EllipseDomain(center={self.center.tolist()}, shape={self.shape.tolist()})"


def square(half_width: float = 1.0, center=(0.0, 0.0)) -> ConvexPolygonDomain:
    return rectangle(half_width, half_width, center)


def rectangle(L: float, H: float, center=(0.0, 0.0)) -> ConvexPolygonDomain:
    """The rectangle |x - cx| < L, |y - cy| < H."""
    cx, cy = center
    return ConvexPolygonDomain([(cx - L, cy - H), (cx + L, cy - H), (cx + L, cy + H), (cx - L, cy + H)])


def contains(domain: ConvexDomain, x, tol: float = 0.0):
    return domain.contains(x, tol)


def chord(domain: ConvexDomain, x, v) -> Chord:
    return domain.chord(x, v)


def inscribe_check(outer: ConvexDomain, inner: ConvexPolygonDomain, tol: float = 1e-9) -> bool:
    """True iff the inner polygon's vertices lie in the closure of ``outer`` and
    the relative interior of every inner edge lies in the open interior."""
    return vertices_in_closure(outer, inner, tol) and not np.any(edges_on_boundary(outer, inner, tol))


def vertices_in_closure(outer: ConvexDomain, inner: ConvexPolygonDomain, tol: float = 1e-9) -> bool:
    m = np.atleast_1d(outer.boundary_margin(inner.vertices))
    return bool(np.all(m >= -tol * max(1.0, outer.scale)))


def edges_on_boundary(outer: ConvexDomain, inner: ConvexPolygonDomain, tol: float = 1e-9) -> np.ndarray:
    """Mask of inner edges (V[i], V[i+1]) whose midpoint is not strictly interior.

    The midpoint test is relative to the edge length, so short edges between
    nearby boundary vertices are judged by their shape, not their size.
    """
    V = inner.vertices
    W = np.roll(V, -1, axis=0)
    length = np.hypot(*(W - V).T)
    mids = 0.5 * (V + W)
    return np.atleast_1d(outer.boundary_margin(mids)) <= tol * length


def boundary_vertices(outer: ConvexDomain, inner: ConvexPolygonDomain, tol: float = 1e-9) -> np.ndarray:
    """Boolean mask of inner vertices lying on the boundary of ``outer``."""
    m = np.atleast_1d(outer.boundary_margin(inner.vertices))
    return np.abs(m) <= tol * max(1.0, outer.scale)


def map_domain(domain: ConvexDomain, g: ProjectiveMap) -> ConvexDomain:
    try:
        return domain.apply_map(g)
    except (DegenerateInputError, PreconditionError) as exc:
        raise DomainError(str(exc)) from exc
