"""Hilbert distance, Finsler norm and Busemann area density.

The area density at x is ``pi / vol(B_x)`` where ``B_x`` is the Finsler unit
ball.  In polar form the ball has radius ``r(theta) = 2 d+ d- / (d+ + d-)``,
the harmonic mean of the two chord arms, and area ``1/2 int r^2``.

Three routes to ``vol(B_x)`` are provided:

* ``"angular"`` -- composite Simpson in theta, doubling the node count until
  the relative change drops below ``rel_tol``.  Works for any domain.
* polygons (``"auto"``) -- the ball of a polygon is itself a polygon whose
  vertices sit on the rays through the domain vertices and their antipodes,
  so its area is a shoelace sum over those 2n rays.
* ellipses (``"auto"``) -- the norm is quadratic (Klein model), so the ball is
  an ellipse recovered from three chord-based norm evaluations.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .convex_domains import ConvexDomain, ConvexPolygonDomain, DomainError, EllipseDomain


@dataclass(frozen=True)
class QuadratureConfig:
    """Knobs for angular and region quadrature.

    angular_points : initial node count for the angular Simpson rule
    rel_tol : relative tolerance for adaptive refinement
    max_depth : subdivision depth cap for ordinary cells
    corner_depth : extra levels allowed for cells touching a boundary vertex
    max_evaluations : density evaluation budget for one region
    """

    angular_points: int = 64
    rel_tol: float = 1e-4
    max_depth: int = 24
    corner_depth: int = 60
    max_evaluations: int = 400_000
    max_angular_points: int = 1 << 16

    def __post_init__(self):
        if self.angular_points < 16:
            raise ValueError("angular_points must be at least 16")
        if not (0.0 < self.rel_tol <= 0.1):
            raise ValueError("rel_tol must lie in (0, 0.1]")
        if self.max_depth < 4:
            raise ValueError("max_depth must be at least 4")
        if self.corner_depth < 0:
            raise ValueError("corner_depth must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "QuadratureConfig":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        unknown = set(d) - set(known)
        if unknown:
            raise ValueError(f"unknown quadrature config keys: {sorted(unknown)}")
        return cls(**known)


DEFAULT_CONFIG = QuadratureConfig()


def _require_interior(domain: ConvexDomain, x, what: str = "point"):
    ok = domain.contains(x)
    if not np.all(ok):
        raise DomainError(f"{what} is not in the interior of the domain")


def hilbert_distance(domain: ConvexDomain, x, y) -> float:
    """Hilbert distance ``1/2 log(|p-y||q-x| / (|p-x||q-y|))``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _require_interior(domain, x, "x")
    _require_interior(domain, y, "y")
    v = y - x
    if not np.any(v):
        return 0.0
    tm, tp = domain.chord_params(x, v)
    tm, tp = float(tm), float(tp)
    # p = x + tm v (tm < 0), q = x + tp v (tp > 1)
    return 0.5 * (math.log1p(1.0 / -tm) + math.log1p(1.0 / (tp - 1.0)))


def finsler_norm(domain: ConvexDomain, x, v):
    """Finsler norm ``1/2 (1/|x-p| + 1/|x-q|) |v|`` of tangent vector(s) v at x."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    _require_interior(domain, x)
    zero = ~np.any(v != 0, axis=-1)
    safe = np.where(zero[..., None], 1.0, v)
    val = np.where(zero, 0.0, _norm_unchecked(domain, x, safe))
    return float(val) if val.ndim == 0 else val


def _norm_unchecked(domain, x, v):
    tm, tp = domain.chord_params(x, v)
    return 0.5 * (1.0 / tp - 1.0 / tm)


def ball_radius(domain: ConvexDomain, x, theta):
    """Radius ``r(theta)`` of the unit ball at x: harmonic mean of the chord arms."""
    x = np.asarray(x, dtype=float)
    u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    xb = np.broadcast_to(x[..., None, :], u.shape[:-1] + (2,)) if x.ndim == 1 else x
    tm, tp = domain.chord_params(xb, u)
    dp, dm = tp, -tm
    return 2.0 * dp * dm / (dp + dm)


@dataclass(frozen=True)
class BallArea:
    value: float
    converged: bool
    nodes: int


def unit_ball_area_angular(domain: ConvexDomain, x, cfg: QuadratureConfig = DEFAULT_CONFIG) -> BallArea:
    """``1/2 int_0^{2 pi} r^2`` by composite Simpson with node doubling.

    The integrand has period pi, so the rule runs over [0, pi] only.
    """
    x = np.asarray(x, dtype=float)
    _require_interior(domain, x)
    n = cfg.angular_points + (cfg.angular_points % 2)
    prev = None
    while True:
        theta = np.linspace(0.0, math.pi, n + 1)
        r2 = ball_radius(domain, x, theta) ** 2
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        val = float(w @ r2) * (math.pi / n) / 3.0
        if prev is not None and abs(val - prev) <= cfg.rel_tol * abs(val):
            return BallArea(val, True, n + 1)
        if 2 * n > cfg.max_angular_points:
            return BallArea(val, False, n + 1)
        prev = val
        n *= 2


def polygon_ball_area(domain: ConvexPolygonDomain, x) -> np.ndarray:
    """Exact unit-ball area for points ``x`` of shape (..., 2) in a polygon.

    Uses the gauge ``g(u) = max_i n_i . u / h_i``: the ball is
    ``{v : g(v) + g(-v) < 2}``, a polygon with vertices on the rays towards
    the domain vertices and their antipodes.
    """
    x = np.asarray(x, dtype=float)
    lead = x.shape[:-1]
    X = x.reshape(-1, 2)
    ell = domain.gauge_vectors(X)  # (P, n, 2)
    D = domain.vertices[None, :, :] - X[:, None, :]  # (P, n, 2)
    ang = np.arctan2(D[..., 1], D[..., 0])
    ang = np.concatenate([ang, ang + math.pi], axis=1)
    ang = np.sort(np.mod(ang, 2.0 * math.pi), axis=1)
    U = np.stack([np.cos(ang), np.sin(ang)], axis=-1)  # (P, 2n, 2)
    proj = np.einsum("pkd,pnd->pkn", U, ell)
    s = proj.max(axis=2) + (-proj).max(axis=2)
    r = 2.0 / s
    Pts = U * r[..., None]
    nxt = np.roll(Pts, -1, axis=1)
    area = 0.5 * np.sum(Pts[..., 0] * nxt[..., 1] - Pts[..., 1] * nxt[..., 0], axis=1)
    return area.reshape(lead)


def _quadratic_metric(domain: ConvexDomain, x) -> np.ndarray:
    """Metric tensor of a quadratic Finsler norm from three norm evaluations."""
    x = np.asarray(x, dtype=float)
    e1 = np.broadcast_to(np.array([1.0, 0.0]), x.shape)
    e2 = np.broadcast_to(np.array([0.0, 1.0]), x.shape)
    n1 = _norm_unchecked(domain, x, e1)
    n2 = _norm_unchecked(domain, x, e2)
    n12 = _norm_unchecked(domain, x, e1 + e2)
    g11, g22 = n1 * n1, n2 * n2
    g12 = 0.5 * (n12 * n12 - g11 - g22)
    return np.stack([np.stack([g11, g12], -1), np.stack([g12, g22], -1)], -2)


def ellipse_ball_area(domain: EllipseDomain, x) -> np.ndarray:
    """Exact unit-ball area in an ellipse, where the norm is Riemannian."""
    G = _quadratic_metric(domain, x)
    return math.pi / np.sqrt(np.linalg.det(G))


def unit_ball_area(domain: ConvexDomain, x, cfg: QuadratureConfig = DEFAULT_CONFIG,
                   method: str = "auto"):
    """Lebesgue area of the Finsler unit ball at x (vectorized for "auto")."""
    if method == "angular":
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return unit_ball_area_angular(domain, x, cfg).value
        return np.array([unit_ball_area_angular(domain, p, cfg).value for p in x.reshape(-1, 2)]
                        ).reshape(x.shape[:-1])
    if method != "auto":
        raise ValueError(f"unknown unit-ball method {method!r}")
    _require_interior(domain, x)
    return _ball_area_unchecked(domain, x)


def _ball_area_unchecked(domain, x):
    if isinstance(domain, ConvexPolygonDomain):
        return polygon_ball_area(domain, x)
    if isinstance(domain, EllipseDomain):
        return ellipse_ball_area(domain, x)
    raise TypeError(f"no exact unit-ball rule for {type(domain).__name__}; use method='angular'")


def busemann_density(domain: ConvexDomain, x, cfg: QuadratureConfig = DEFAULT_CONFIG,
                     method: str = "auto"):
    """Hilbert area density ``pi / vol(B_x(1))`` at x."""
    return math.pi / unit_ball_area(domain, x, cfg, method)


def density_unchecked(domain: ConvexDomain, x: np.ndarray) -> np.ndarray:
    """Density on an (N, 2) array without the interior check (quadrature hot path)."""
    return math.pi / _ball_area_unchecked(domain, x)


def dv_density(x, y, L: float, H: float):
    """Comparison density ``pi H L / ((L^2 - x^2)(H^2 - y^2))`` of the rectangle |x|<L, |y|<H."""
    return math.pi * H * L / ((L * L - np.square(x)) * (H * H - np.square(y)))


def klein_distance(x, y) -> float:
    """Closed-form distance in the unit disk: artanh of the Klein-model ratio."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    cross = x[0] * y[1] - x[1] * y[0]
    num = math.sqrt(max(d @ d - cross * cross, 0.0))
    return math.atanh(num / (1.0 - x @ y))


def klein_density(x):
    """Area density ``(1 - |x|^2)^(-3/2)`` of the unit disk."""
    x = np.asarray(x, dtype=float)
    return (1.0 - np.sum(x * x, axis=-1)) ** -1.5
