"""Points, lines and flags of the real projective plane.

Homogeneous triples are stored normalized to unit Euclidean norm with the
first nonzero coordinate positive, so two representatives of the same
projective object compare equal up to rounding.
"""

from __future__ import annotations

import json
import math
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-10


class ProjectiveError(ValueError):
    """Base class for invalid projective input."""


class DegenerateInputError(ProjectiveError):
    """Coincident points/lines or a vanishing determinant where none is allowed."""


class PreconditionError(ProjectiveError):
    """Input violates a stated precondition (collinearity, general position...)."""


def _normalize(v, what: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(arr)):
        raise DegenerateInputError(f"{what} has non-finite coordinates: {arr}")
    n = np.linalg.norm(arr)
    if n == 0.0:
        raise DegenerateInputError(f"{what} coordinates are all zero")
    arr = arr / n
    nz = np.flatnonzero(arr)
    if arr[nz[0]] < 0:
        arr = -arr
    return arr


class _Homogeneous:
    __slots__ = ("_v",)
    _kind = "element"

    def __init__(self, coords):
        self._v = _normalize(coords, self._kind)
        self._v.setflags(write=False)

    @property
    def vec(self) -> np.ndarray:
        """Unit-norm representative (read-only)."""
        return self._v

    def isclose(self, other, tol: float = DEFAULT_TOL) -> bool:
        # representatives are sign-normalized, but guard the sign anyway
        d = min(np.linalg.norm(self._v - other._v), np.linalg.norm(self._v + other._v))
        return bool(d <= tol * 10)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.isclose(other)

    __hash__ = None

    def to_json(self) -> str:
        return json.dumps([float(c) for c in self._v])

    def __repr__(self):
        a, b, c = self._v
        return f"{type(self).__name__}({a:.6g}, {b:.6g}, {c:.6g})"


class ProjectivePoint(_Homogeneous):
    """A point of RP^2 given by homogeneous coordinates (alpha, beta, gamma)."""

    __slots__ = ()
    _kind = "point"

    @classmethod
    def affine(cls, x: float, y: float) -> "ProjectivePoint":
        return cls((x, y, 1.0))

    @property
    def coords(self) -> np.ndarray:
        return self._v

    def is_finite(self, tol: float = DEFAULT_TOL) -> bool:
        return abs(self._v[2]) > tol

    def to_affine(self) -> np.ndarray:
        """Inhomogeneous coordinates (alpha/gamma, beta/gamma)."""
        g = self._v[2]
        if g == 0.0:
            raise DegenerateInputError("point at infinity has no affine coordinates")
        return np.array([self._v[0] / g, self._v[1] / g])


class ProjectiveLine(_Homogeneous):
    """A line {p : coeffs . p = 0} of RP^2."""

    __slots__ = ()
    _kind = "line"

    @classmethod
    def from_slope(cls, slope: float, through) -> "ProjectiveLine":
        """Line y = slope*(x - x0) + y0; an infinite slope gives the vertical line."""
        x0, y0 = through
        if math.isinf(slope):
            return cls((1.0, 0.0, -x0))
        return cls((slope, -1.0, y0 - slope * x0))

    @property
    def coeffs(self) -> np.ndarray:
        return self._v

    def evaluate(self, p) -> float:
        """Value of the linear functional on a representative of ``p``."""
        v = p.coords if isinstance(p, ProjectivePoint) else np.asarray(p, dtype=float)
        return float(self._v @ v)

    def incident(self, p: ProjectivePoint, tol: float = DEFAULT_TOL) -> bool:
        return abs(self._v @ p.coords) <= tol

    def slope(self) -> float:
        a, b, _ = self._v
        if b == 0.0:
            return math.inf
        return -a / b


class Flag:
    """A point lying on a line, optionally labelled (e.g. ``"A"``)."""

    __slots__ = ("point", "line", "label")

    def __init__(self, point: ProjectivePoint, line: ProjectiveLine, label: str = "",
                 tol: float = DEFAULT_TOL):
        if not line.incident(point, tol):
            raise PreconditionError(
                f"flag {label or ''}: point {point} is not on line {line}")
        self.point = point
        self.line = line
        self.label = label

    def __repr__(self):
        return f"Flag({self.label!r}, {self.point!r}, {self.line!r})"


class ProjectiveMap:
    """An element of PGL(3, R) acting on points by M p and on lines by M^{-T} l."""

    __slots__ = ("matrix", "_inv")

    def __init__(self, matrix, tol: float = DEFAULT_TOL):
        m = np.array(matrix, dtype=float).reshape(3, 3)
        scale = np.linalg.norm(m)
        if scale == 0.0 or abs(np.linalg.det(m / scale)) <= tol:
            raise DegenerateInputError("projective map matrix is singular")
        self.matrix = m / scale
        self.matrix.setflags(write=False)
        self._inv = np.linalg.inv(self.matrix)

    @classmethod
    def identity(cls) -> "ProjectiveMap":
        return cls(np.eye(3))

    def __call__(self, obj):
        if isinstance(obj, ProjectivePoint):
            return ProjectivePoint(self.matrix @ obj.coords)
        if isinstance(obj, ProjectiveLine):
            return ProjectiveLine(self._inv.T @ obj.coeffs)
        if isinstance(obj, Flag):
            return Flag(self(obj.point), self(obj.line), obj.label)
        raise TypeError(f"cannot apply a projective map to {type(obj).__name__}")

    def apply_affine(self, pts) -> np.ndarray:
        """Map an (N, 2) array of affine points, returning affine images."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        h = np.column_stack([pts, np.ones(len(pts))]) @ self.matrix.T
        if np.any(h[:, 2] == 0.0):
            raise DegenerateInputError("point sent to the line at infinity")
        return h[:, :2] / h[:, 2:3]

    def compose(self, other: "ProjectiveMap") -> "ProjectiveMap":
        """Return self o other."""
        return ProjectiveMap(self.matrix @ other.matrix)

    def inverse(self) -> "ProjectiveMap":
        return ProjectiveMap(self._inv)

    def isclose(self, other: "ProjectiveMap", tol: float = 1e-9) -> bool:
        a, b = self.matrix, other.matrix
        return bool(min(np.linalg.norm(a - b), np.linalg.norm(a + b)) <= tol)

    def __repr__(self):
        return f"ProjectiveMap({np.array2string(self.matrix, precision=4)})"


def join(p: ProjectivePoint, q: ProjectivePoint, tol: float = DEFAULT_TOL) -> ProjectiveLine:
    """Line through two distinct points."""
    c = np.cross(p.coords, q.coords)
    if np.linalg.norm(c) <= tol:
        raise DegenerateInputError(f"join of coincident points {p} and {q}")
    return ProjectiveLine(c)


def meet(l: ProjectiveLine, m: ProjectiveLine, tol: float = DEFAULT_TOL) -> ProjectivePoint:
    """Intersection point of two distinct lines."""
    c = np.cross(l.coeffs, m.coeffs)
    if np.linalg.norm(c) <= tol:
        raise DegenerateInputError(f"meet of coincident lines {l} and {m}")
    return ProjectivePoint(c)


def _bracket(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _cross_ratio_2d(c: np.ndarray) -> float:
    # c: (4, 2) coordinates in a basis of the common 2-plane
    b12 = _bracket(c[0], c[1])
    b34 = _bracket(c[2], c[3])
    b14 = _bracket(c[0], c[3])
    b23 = _bracket(c[1], c[2])
    if abs(b12) < 1e-14 or abs(b23) < 1e-14 or abs(_bracket(c[0], c[2])) < 1e-14:
        raise DegenerateInputError("cross ratio needs x1, x2, x3 pairwise distinct")
    if abs(b14) < 1e-14:
        return math.inf
    return b12 * b34 / (b14 * b23)


def _plane_coords(vectors: np.ndarray, tol: float, what: str) -> np.ndarray:
    """Coordinates of 4 unit vectors in an orthonormal basis of their common plane."""
    _, sv, vt = np.linalg.svd(vectors)
    if sv[2] > tol * 10 * max(sv[0], 1.0):
        raise PreconditionError(f"the four {what} are not {'collinear' if what == 'points' else 'concurrent'}")
    basis = vt[:2]
    return vectors @ basis.T


def cross_ratio_collinear(x1: ProjectivePoint, x2: ProjectivePoint, x3: ProjectivePoint,
                          x4: ProjectivePoint, tol: float = DEFAULT_TOL) -> float:
    """Cross ratio (x1-x2)(x3-x4) / ((x1-x4)(x2-x3)) of four collinear points.

    Takes the value infinity at x4 = x1, -1 at x4 = x2 and 0 at x4 = x3.
    """
    v = np.array([x1.coords, x2.coords, x3.coords, x4.coords])
    return _cross_ratio_2d(_plane_coords(v, tol, "points"))


def cross_ratio_concurrent(l1: ProjectiveLine, l2: ProjectiveLine, l3: ProjectiveLine,
                           l4: ProjectiveLine, tol: float = DEFAULT_TOL) -> float:
    """Cross ratio of four concurrent lines.

    The lines are cut by the reference line whose coefficient vector is the
    representative of the common point; that line never passes through it.
    """
    v = np.array([l1.coeffs, l2.coeffs, l3.coeffs, l4.coeffs])
    _plane_coords(v, tol, "lines")
    common = meet(l1, l2, tol)
    ref = ProjectiveLine(common.coords)
    pts = [meet(l, ref, tol) for l in (l1, l2, l3, l4)]
    return cross_ratio_collinear(*pts, tol=tol)


def triple_ratio(fa: Flag, fb: Flag, fc: Flag) -> float:
    """Triple ratio f_a(B) f_b(C) f_c(A) / (f_a(C) f_b(A) f_c(B)) of three flags.

    Depends only on the cyclic order; reversing it gives the reciprocal.
    """
    A, B, C = fa.point.coords, fb.point.coords, fc.point.coords
    a, b, c = fa.line.coeffs, fb.line.coeffs, fc.line.coeffs
    num = (a @ B) * (b @ C) * (c @ A)
    den = (a @ C) * (b @ A) * (c @ B)
    if abs(den) <= 1e-15 or abs(num) <= 1e-15:
        raise DegenerateInputError("flags not in general position (vanishing triple ratio factor)")
    return float(num / den)


def _frame(pts: Sequence[ProjectivePoint], tol: float) -> np.ndarray:
    """Matrix sending e1, e2, e3, (1,1,1) to the four given points."""
    P = np.column_stack([p.coords for p in pts[:3]])
    if abs(np.linalg.det(P)) <= tol:
        raise PreconditionError("first three points are collinear")
    lam = np.linalg.solve(P, pts[3].coords)
    if np.min(np.abs(lam)) <= tol:
        raise PreconditionError("fourth point is collinear with two of the others")
    return P * lam


def map_four_points(src: Sequence[ProjectivePoint], dst: Sequence[ProjectivePoint],
                    tol: float = DEFAULT_TOL) -> ProjectiveMap:
    """The unique projective map with src[i] -> dst[i] for i = 0..3."""
    if len(src) != 4 or len(dst) != 4:
        raise PreconditionError("need exactly four source and four target points")
    S = _frame(src, tol)
    D = _frame(dst, tol)
    return ProjectiveMap(D @ np.linalg.inv(S))


NORMAL_FORM = {
    "A": (0.0, 0.0),
    "B": (1.0, 1.0),
    "C": (0.0, 2.0),
    "a^c": (-1.0, 1.0),
}


def normalize_quadrilateral(fa: Flag, fb: Flag, fc: Flag, fd: Flag | None = None,
                            tol: float = DEFAULT_TOL) -> ProjectiveMap:
    """Map sending A, B, C, a^c to (0,0), (1,1), (0,2), (-1,1).

    ``fd`` is accepted for symmetry with the quadrilateral data; D does not
    enter the normalization and ends up at the moduli point (mu, nu).
    """
    ac = meet(fa.line, fc.line, tol)
    src = [fa.point, fb.point, fc.point, ac]
    dst = [ProjectivePoint.affine(*NORMAL_FORM[k]) for k in ("A", "B", "C", "a^c")]
    g = map_four_points(src, dst, tol)
    for p, q in zip(src, dst):
        if not g(p).isclose(q, 1e-8):
            raise PreconditionError("normalization failed to hit its targets")
    if fd is not None and not g(fd.point).is_finite():
        raise PreconditionError("D is sent to infinity by the normalization")
    return g


def random_projective_map(rng: np.random.Generator, scale: float = 0.3) -> ProjectiveMap:
    """Identity plus a Gaussian perturbation; handy for invariance checks."""
    return ProjectiveMap(np.eye(3) + scale * rng.standard_normal((3, 3)))
