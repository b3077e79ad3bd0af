"""Fock-Goncharov coordinates of inscribed triangles and quadrilaterals.

Quadrilaterals are normalized so that A=(0,0), B=(1,1), C=(0,2) and the
corner a^c of the flag lines sits at (-1,1); then a is y=-x and c is y=x+2.
The fourth flag point D=(mu, nu) lies in the open moduli triangle with
vertices A, C and a^c.  Edge parameters W, Z and the triple ratio Y of ACD
describe (D, d); the triple ratio T of ABC fixes the flag line b.

Formulas used throughout (V = 1/Z, F = 1/(W+V+1))::

    mu = -F                  nu = (1 + 2V) F
    W = (2 - nu + mu)/(-2 mu)    Z = -2 mu/(mu + nu)
    Y = (2-nu+mu)(nu-mu m) / ((nu+mu)(-2+nu-mu m))

The combinations ``mu+nu = 2F/Z`` and ``2-nu+mu = 2WF`` are evaluated in
these cancellation-free forms so that configurations with D very close to
the boundary of the moduli triangle stay accurate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .convex_domains import ConvexPolygonDomain
from .projective import (Flag, PreconditionError, ProjectiveLine, ProjectivePoint, meet,
                         triple_ratio)

EXPONENT_MATRIX = np.array([[1.0, -3.0], [1.0, 3.0]])  # (log Z, log W) = M @ (u, v)


class StratumError(PreconditionError):
    """Input on (or beyond) the boundary of the moduli triangle.

    ``stratum`` is one of ``"A"``, ``"C"``, ``"a^c"``, ``"a"``, ``"c"``,
    ``"AC"`` or ``"exterior"``.
    """

    def __init__(self, stratum: str, msg: str):
        super().__init__(f"{msg} (stratum {stratum})")
        self.stratum = stratum


class ConfigurationError(PreconditionError):
    """Assembled quadrilateral fails convexity or inscription at a named corner."""

    def __init__(self, corner: str, msg: str):
        super().__init__(f"{msg} (at {corner})")
        self.corner = corner


# ---------------------------------------------------------------- triangles

@dataclass(frozen=True)
class TriangleInvariant:
    """Triple ratio T of an inscribed triangle, with its chart parameters if known."""

    T: float
    t: tuple[float, float, float] | None = None

    @classmethod
    def from_chart(cls, t_A: float, t_B: float, t_C: float) -> "TriangleInvariant":
        return cls(triangle_invariant(t_A, t_B, t_C), (float(t_A), float(t_B), float(t_C)))

    @property
    def inscribed(self) -> bool:
        return self.T > 0 and (self.t is None or all(0 < s < 1 for s in self.t))


def triangle_invariant(t_A: float, t_B: float, t_C: float) -> float:
    """prod t/(1-t) over the three chart parameters.

    Values outside (0, 1) are accepted (the product may then be negative,
    meaning ABC is not inscribed in abc).
    """
    out = 1.0
    for t in (t_A, t_B, t_C):
        if t == 1.0:
            raise PreconditionError("chart parameter t=1 puts a flag point on a vertex of abc")
        out *= t / (1.0 - t)
    return out


def triangle_flags(t_A: float, t_B: float, t_C: float) -> tuple[Flag, Flag, Flag]:
    """Flags in the chart a: y=0, b: y=1-x, c: x=0 with the given t-parameters."""
    a = ProjectiveLine((0.0, 1.0, 0.0))
    b = ProjectiveLine((1.0, 1.0, -1.0))
    c = ProjectiveLine((1.0, 0.0, 0.0))
    A = ProjectivePoint.affine(t_A, 0.0)
    B = ProjectivePoint.affine(1.0 - t_B, t_B)
    C = ProjectivePoint.affine(0.0, 1.0 - t_C)
    return Flag(A, a, "A"), Flag(B, b, "B"), Flag(C, c, "C")


def triangle_for_invariant(T: float) -> tuple[float, float, float]:
    """Chart parameters (1/2, 1/2, T/(1+T)) realizing triple ratio T > 0."""
    if not T > 0:
        raise PreconditionError("inscribed triangles have T > 0")
    return 0.5, 0.5, T / (1.0 + T)


def triangle_domains(T: float) -> tuple[ConvexPolygonDomain, ConvexPolygonDomain]:
    """Outer triangle abc and inscribed ABC for triple ratio T (chart of ``triangle_flags``)."""
    fa, fb, fc = triangle_flags(*triangle_for_invariant(T))
    outer = ConvexPolygonDomain.from_points([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    inner = ConvexPolygonDomain.from_points([f.point.to_affine() for f in (fa, fb, fc)])
    return outer, inner


# ------------------------------------------------------- moduli dictionary

def _check_wz(W: float, Z: float):
    if not (W > 0 and Z > 0 and math.isfinite(W) and math.isfinite(Z)):
        raise PreconditionError(f"edge parameters must be positive and finite, got W={W}, Z={Z}")


class ModuliPoint(tuple):
    """D = (mu, nu) together with its gaps (-mu, mu+nu, 2-nu+mu) to the three
    sides AC, a, c of the moduli triangle.

    Near the boundary the gaps cannot be recovered from (mu, nu) by
    subtraction without cancellation, so points built from edge parameters
    keep them.  Unpacks like a plain pair.
    """

    def __new__(cls, mu: float, nu: float, gaps: tuple[float, float, float] | None = None):
        self = super().__new__(cls, (mu, nu))
        self.gaps = gaps if gaps is not None else (-mu, mu + nu, 2.0 - nu + mu)
        return self

    @property
    def mu(self) -> float:
        return self[0]

    @property
    def nu(self) -> float:
        return self[1]


def d_from_wz(W: float, Z: float) -> ModuliPoint:
    """Cartesian D=(mu, nu) from edge parameters."""
    _check_wz(W, Z)
    V = 1.0 / Z
    F = 1.0 / (W + V + 1.0)
    return ModuliPoint(-F, (1.0 + 2.0 * V) * F, (F, 2.0 * V * F, 2.0 * W * F))


def moduli_stratum(mu: float, nu: float, tol: float = 0.0) -> str | None:
    """None for interior points of the moduli triangle, else the stratum name."""
    on_AC = abs(mu) <= tol
    on_a = abs(nu + mu) <= tol
    on_c = abs(nu - mu - 2.0) <= tol
    if on_AC and on_a:
        return "A"
    if on_AC and on_c:
        return "C"
    if on_a and on_c:
        return "a^c"
    if on_AC:
        return "AC"
    if on_a:
        return "a"
    if on_c:
        return "c"
    if mu > 0 or nu + mu < 0 or nu - mu - 2.0 > 0:
        return "exterior"
    return None


def _require_interior(mu: float, nu: float):
    s = moduli_stratum(mu, nu)
    if s is not None:
        raise StratumError(s, f"D=({mu}, {nu}) is not interior to the moduli triangle")


def wz_from_d(mu, nu: float | None = None) -> tuple[float, float]:
    """Inverse relations W = (2-nu+mu)/(-2mu), Z = -2mu/(mu+nu).

    Accepts ``wz_from_d(mu, nu)`` or a single ``ModuliPoint``, whose stored
    gaps make the round trip from ``d_from_wz`` exact to rounding.  For a
    bare pair the relative error grows like eps (Z + 1/W).
    """
    if nu is None:
        point = mu if isinstance(mu, ModuliPoint) else ModuliPoint(*mu)
    else:
        point = ModuliPoint(mu, nu)
    _require_interior(point.mu, point.nu)
    g_ac, g_a, g_c = point.gaps
    return g_c / (2.0 * g_ac), 2.0 * g_ac / g_a


def y_invariant(mu: float, nu: float, m: float) -> float:
    """Triple ratio of (A,a), (C,c), (D,d) with d through D of slope m (inf: vertical)."""
    if math.isinf(m):
        if nu + mu == 0.0:
            raise StratumError("a", "degenerate flag d")
        return (2.0 - nu + mu) / (nu + mu)
    u = nu - mu * m
    den = (nu + mu) * (u - 2.0)
    if den == 0.0 or u == 0.0:
        raise StratumError("a" if nu + mu == 0.0 else "C" if u == 2.0 else "A",
                           "degenerate flag d")
    return (2.0 - nu + mu) * u / den


def _d_coeffs(mu: float, nu: float, s_plus: float, s_minus: float, Y: float) -> np.ndarray:
    """Coefficients of d, proportional to (m, -1, nu - mu m), finite when d is vertical.

    s_plus = nu + mu and s_minus = 2 - nu + mu are passed in so callers can
    supply cancellation-free values.  From (nu+mu) Y (u-2) = (2-nu+mu) u the
    intercept is u = 2 Y s_plus / den with den = Y s_plus - s_minus.
    """
    den = Y * s_plus - s_minus
    num = 2.0 * Y * s_plus
    if num == 0.0:
        raise StratumError("a", "flag line d passes through A")
    # (m, -1, u) * mu * den
    return np.array([nu * den - num, -mu * den, num * mu])


def m_from_y(mu: float, nu: float, Y: float) -> float:
    """Slope of d from the bilinear relation (mu+nu) Y (u-2) = (2-nu+mu) u, u = nu - mu m.

    Returns ``inf`` when d is vertical.
    """
    if not Y > 0:
        raise PreconditionError("inscribed quadrilaterals have Y > 0")
    _require_interior(mu, nu)
    c = _d_coeffs(mu, nu, nu + mu, 2.0 - nu + mu, Y)
    if c[1] == 0.0:
        return math.inf
    return -c[0] / c[1]


def slope_b_from_t(T: float) -> float:
    """Slope of b through B=(1,1) making the triple ratio of AaBbCc equal T.

    b has normal (1+T, 1-T); T=1 gives the vertical line.
    """
    if not T > 0:
        raise PreconditionError("inscribed quadrilaterals have T > 0")
    if T == 1.0:
        return math.inf
    return -(1.0 + T) / (1.0 - T)


def line_b_from_t(T: float) -> ProjectiveLine:
    if not T > 0:
        raise PreconditionError("inscribed quadrilaterals have T > 0")
    return ProjectiveLine((1.0 + T, 1.0 - T, -2.0))


# ------------------------------------------------------- configurations

@dataclass(frozen=True)
class QuadParams:
    """Canonical quadrilateral data (W, Z, T, Y); mu, nu, m are derived."""

    W: float
    Z: float
    T: float = 1.0
    Y: float = 1.0

    def __post_init__(self):
        _check_wz(self.W, self.Z)
        if not (self.T > 0 and self.Y > 0):
            raise PreconditionError("T and Y must be positive")

    @property
    def F(self) -> float:
        return 1.0 / (self.W + 1.0 / self.Z + 1.0)

    @property
    def mu(self) -> float:
        return -self.F

    @property
    def nu(self) -> float:
        return (1.0 + 2.0 / self.Z) * self.F

    def d_coeffs(self) -> np.ndarray:
        """Homogeneous coefficients of d, computed without cancellation."""
        F = self.F
        return _d_coeffs(self.mu, self.nu, 2.0 * F / self.Z, 2.0 * self.W * F, self.Y)

    @property
    def m(self) -> float:
        c = self.d_coeffs()
        return math.inf if c[1] == 0.0 else -c[0] / c[1]

    @classmethod
    def from_d(cls, mu: float, nu: float, T: float = 1.0, Y: float = 1.0) -> "QuadParams":
        W, Z = wz_from_d(mu, nu)
        return cls(W, Z, T, Y)

    def to_dict(self) -> dict:
        return {"W": self.W, "Z": self.Z, "T": self.T, "Y": self.Y}

    @classmethod
    def from_dict(cls, d: dict) -> "QuadParams":
        return cls(float(d["W"]), float(d["Z"]), float(d.get("T", 1.0)), float(d.get("Y", 1.0)))


def reflect(p: QuadParams) -> QuadParams:
    """Image under the reflection in y=1: (W, Z, T, Y) -> (1/Z, 1/W, 1/T, 1/Y)."""
    return QuadParams(1.0 / p.Z, 1.0 / p.W, 1.0 / p.T, 1.0 / p.Y)


@dataclass(frozen=True)
class QuadConfiguration:
    params: QuadParams
    points: dict
    lines: dict
    outer: ConvexPolygonDomain
    inner: ConvexPolygonDomain

    def flags(self) -> tuple[Flag, Flag, Flag, Flag]:
        return tuple(Flag(self.points[k], self.lines[k.lower()], k, tol=1e-8) for k in "ABCD")

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "points": {k: p.to_affine().tolist() for k, p in self.points.items()},
            "lines": {k: l.coeffs.tolist() for k, l in self.lines.items()},
            "outer": self.outer.vertices.tolist(),
            "inner": self.inner.vertices.tolist(),
        }


_CORNERS = ("a^b", "b^c", "c^d", "d^a")


def build_configuration(params: QuadParams) -> QuadConfiguration:
    """Points A, B, C, D, lines a, b, c, d and the two polygons abcd, ABCD."""
    F = params.F
    mu, nu = -F, (1.0 + 2.0 / params.Z) * F
    if mu == 0.0 or nu + mu == 0.0:
        raise StratumError("A" if mu == 0.0 else "a", "D collapsed onto the boundary in floating point")
    pts = {
        "A": ProjectivePoint.affine(0.0, 0.0),
        "B": ProjectivePoint.affine(1.0, 1.0),
        "C": ProjectivePoint.affine(0.0, 2.0),
        "D": ProjectivePoint.affine(mu, nu),
    }
    lines = {
        "a": ProjectiveLine((1.0, 1.0, 0.0)),
        "b": line_b_from_t(params.T),
        "c": ProjectiveLine((1.0, -1.0, 2.0)),
        "d": ProjectiveLine(params.d_coeffs()),
    }
    corners = []
    for name in _CORNERS:
        p = meet(lines[name[0]], lines[name[2]])
        if not p.is_finite(1e-14):
            raise ConfigurationError(name, "flag lines meet at infinity")
        corners.append(p.to_affine())
    corners = np.array(corners)
    _check_convex(corners)
    _check_between(corners, pts)
    outer = ConvexPolygonDomain(corners)
    inner = ConvexPolygonDomain(np.array([pts[k].to_affine() for k in "ABCD"]))
    return QuadConfiguration(params, pts, lines, outer, inner)


def _check_convex(corners: np.ndarray):
    # abcd is traversed counterclockwise in the normalized chart
    n = len(corners)
    for i in range(n):
        p, q, r = corners[i - 1], corners[i], corners[(i + 1) % n]
        cr = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0])
        if not cr > 0:
            raise ConfigurationError(_CORNERS[i], "outer quadrilateral abcd is not strictly convex")


def _check_between(corners: np.ndarray, pts: dict):
    # flag point X lies strictly between the two corners on its line
    ends = {"A": (3, 0), "B": (0, 1), "C": (1, 2), "D": (2, 3)}
    for k, (i, j) in ends.items():
        X = pts[k].to_affine()
        P, Q = corners[i], corners[j]
        d = Q - P
        # both differences are formed directly so nearby points keep their precision
        if not ((X - P) @ d > 0.0 and (Q - X) @ d > 0.0):
            raise ConfigurationError(k, f"flag point {k} is not between {_CORNERS[i]} and {_CORNERS[j]}")


# ------------------------------------------------------- central quantity

def central_q(W: float, Z: float) -> float:
    """Q = (1/Z) log(1 + W + 1/Z)."""
    _check_wz(W, Z)
    return math.log1p(W + 1.0 / Z) / Z


def central_q_from_d(mu: float, nu: float) -> float:
    """Q = ((mu+nu)/(-2mu)) log(-1/mu)."""
    _require_interior(mu, nu)
    return (mu + nu) / (-2.0 * mu) * math.log(-1.0 / mu)


def central_q_from_slope(s: float, mu: float) -> float:
    """Q = -((1+s)/2) log(-1/mu) with s = nu/mu the secant slope."""
    if not -1.0 < mu < 0.0:
        raise PreconditionError("mu must lie in (-1, 0)")
    if not s < -1.0:
        raise StratumError("a", "secant slope must be below -1")
    return -0.5 * (1.0 + s) * math.log(-1.0 / mu)


def q_graph(f, x: float) -> float:
    """Q_f(x) = ((f(x) - x)/x) log(1/x) for the graph y = f(x), D = (-x, f(x))."""
    if not 0.0 < x < 1.0:
        raise PreconditionError("q_graph needs 0 < x < 1")
    fx = f(x) if callable(f) else float(f)
    if fx < x:
        raise StratumError("exterior", f"f(x)={fx} < x={x}: secant slope out of range")
    return (fx - x) / x * math.log(1.0 / x)


# ------------------------------------------------------- twist and bulge

@dataclass(frozen=True)
class TwistBulge:
    """Twist u and bulge v acting by (Z, W) -> (e^(u-3v) Z, e^(u+3v) W)."""

    u: float = 0.0
    v: float = 0.0

    def apply(self, W: float, Z: float) -> tuple[float, float]:
        _check_wz(W, Z)
        return math.exp(self.u + 3.0 * self.v) * W, math.exp(self.u - 3.0 * self.v) * Z

    def compose(self, other: "TwistBulge") -> "TwistBulge":
        return TwistBulge(self.u + other.u, self.v + other.v)

    def inverse(self) -> "TwistBulge":
        return TwistBulge(-self.u, -self.v)

    @classmethod
    def between(cls, W0: float, Z0: float, W: float, Z: float) -> "TwistBulge":
        """The unique (u, v) carrying (W0, Z0) to (W, Z)."""
        _check_wz(W0, Z0)
        _check_wz(W, Z)
        lz = math.log(Z / Z0)
        lw = math.log(W / W0)
        return cls(0.5 * (lz + lw), (lw - lz) / 6.0)


def twist_bulge_apply(W: float, Z: float, tb: TwistBulge) -> tuple[float, float]:
    return tb.apply(W, Z)


# ------------------------------------------------------- degeneration catalog

class Limit(str, enum.Enum):
    ZERO = "0"
    POS = "+"
    INF = "inf"

    @classmethod
    def parse(cls, s) -> "Limit":
        if isinstance(s, cls):
            return s
        key = {"0": "0", "zero": "0", "+": "+", "pos": "+", "inf": "inf", "∞": "inf",
               "infinity": "inf"}.get(str(s).strip().lower())
        if key is None:
            raise PreconditionError(f"unknown limit symbol {s!r}")
        return cls(key)


class Ratio(str, enum.Enum):
    TO_INF = "inf"   # Z/W -> infinity
    TO_ZERO = "0"    # Z/W -> 0

    @classmethod
    def parse(cls, s) -> "Ratio":
        if isinstance(s, cls):
            return s
        key = {"inf": "inf", "∞": "inf", "0": "0", "zero": "0"}.get(str(s).strip().lower())
        if key is None:
            raise PreconditionError(f"unknown ratio direction {s!r}")
        return cls(key)


class Stratum(str, enum.Enum):
    A = "A"
    C = "C"
    CORNER = "a^c"
    EDGE_AC = "AC-A-C"
    EDGE_LINES = "a+c-A-C"


class QBound(str, enum.Enum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    DEPENDS = "depends"


@dataclass(frozen=True)
class DegenerationCase:
    """One row of the ten-case catalog.

    ``predicted_limit`` and ``q_bounded`` follow the catalog; ``formula_limit``
    lists the strata D can actually reach by letting (Z, W) follow the given
    symbols in ``d_from_wz``.
    """

    z_limit: Limit
    w_limit: Limit
    ratio_limit: Ratio
    predicted_limit: Stratum
    q_bounded: QBound
    formula_limit: tuple[Stratum, ...]

    @property
    def key(self) -> str:
        return f"Z/W->{self.ratio_limit.value}:({self.z_limit.value},{self.w_limit.value})"


_Z, _P, _I = Limit.ZERO, Limit.POS, Limit.INF
_S = Stratum
CATALOG: dict[tuple[Ratio, Limit, Limit], DegenerationCase] = {}
for _r, _z, _w, _pred, _q, _form in [
    (Ratio.TO_INF, _Z, _Z, _S.C, QBound.DEPENDS, (_S.C,)),
    (Ratio.TO_INF, _P, _Z, _S.EDGE_LINES, QBound.UNBOUNDED, (_S.EDGE_LINES,)),
    (Ratio.TO_INF, _I, _Z, _S.EDGE_LINES, QBound.UNBOUNDED, (_S.CORNER,)),
    (Ratio.TO_INF, _I, _P, _S.EDGE_LINES, QBound.UNBOUNDED, (_S.EDGE_LINES,)),
    (Ratio.TO_INF, _I, _I, _S.A, QBound.BOUNDED, (_S.A,)),
    (Ratio.TO_ZERO, _Z, _Z, _S.C, QBound.DEPENDS, (_S.C,)),
    (Ratio.TO_ZERO, _Z, _P, _S.EDGE_AC, QBound.UNBOUNDED, (_S.C,)),
    (Ratio.TO_ZERO, _Z, _I, _S.EDGE_AC, QBound.UNBOUNDED, (_S.A, _S.EDGE_AC, _S.C)),
    (Ratio.TO_ZERO, _P, _I, _S.EDGE_AC, QBound.UNBOUNDED, (_S.A,)),
    (Ratio.TO_ZERO, _I, _I, _S.A, QBound.DEPENDS, (_S.A,)),
]:
    CATALOG[(_r, _z, _w)] = DegenerationCase(_z, _w, _r, _pred, _q, _form)


def classify_degeneration(z_limit, w_limit, ratio_direction) -> DegenerationCase:
    """Catalog entry for limit symbols of (Z, W) and the direction of Z/W."""
    key = (Ratio.parse(ratio_direction), Limit.parse(z_limit), Limit.parse(w_limit))
    try:
        return CATALOG[key]
    except KeyError:
        raise PreconditionError(
            f"(Z, W) -> ({key[1].value}, {key[2].value}) is incompatible with Z/W -> {key[0].value}"
        ) from None


def stratum_of_point(mu: float, nu: float, tol: float) -> Stratum | None:
    """Nearest boundary stratum of the moduli triangle if D is within ``tol`` of it."""
    dA = math.hypot(mu, nu)
    dC = math.hypot(mu, nu - 2.0)
    dK = math.hypot(mu + 1.0, nu - 1.0)
    if dA <= tol:
        return Stratum.A
    if dC <= tol:
        return Stratum.C
    if dK <= tol:
        return Stratum.CORNER
    if abs(mu) <= tol:
        return Stratum.EDGE_AC
    if abs(nu + mu) / math.sqrt(2) <= tol or abs(nu - mu - 2.0) / math.sqrt(2) <= tol:
        return Stratum.EDGE_LINES
    return None


# ------------------------------------------------------- split charts

@dataclass(frozen=True)
class QuadPiece:
    """A triangle of the quadrilateral together with the outer domain, in one chart."""

    label: str
    outer: ConvexPolygonDomain
    region: ConvexPolygonDomain


def _mp_cross(u, v):
    return [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]


def _mp_frame(pts):
    P = mpmath.matrix([[p[i] for p in pts[:3]] for i in range(3)])
    lam = mpmath.lu_solve(P, mpmath.matrix(pts[3]))
    return P * mpmath.diag([lam[0], lam[1], lam[2]])


def _acd_chart(params: QuadParams) -> QuadPiece:
    """ACD and abcd in the chart where the flag triangle acd is standard.

    The corners a^c, c^d, d^a go to (0,0), (1,0), (0,1) and A, C to the
    midpoints of their sides; D then sits on x+y=1 at a position fixed by Y.
    Everything is evaluated in extended precision from (W, Z, T, Y) so that
    the near-coincident points of a degenerate configuration separate
    correctly before rounding to floats.
    """
    logs = [abs(math.log10(v)) for v in (params.W, params.Z, params.T, params.Y)]
    with mpmath.workdps(40 + int(3 * max(logs))):
        W, Z, T, Y = (mpmath.mpf(v) for v in (params.W, params.Z, params.T, params.Y))
        F = 1 / (W + 1 / Z + 1)
        mu, nu = -F, (1 + 2 / Z) * F
        sp, sm = 2 * F / Z, 2 * W * F
        den, num = Y * sp - sm, 2 * Y * sp
        a, b, c = [1, 1, 0], [1 + T, 1 - T, -2], [1, -1, 2]
        d = [nu * den - num, -mu * den, num * mu]
        A, C, D = [0, 0, 1], [0, 2, 1], [mu, nu, 1]
        K_ac, K_cd, K_da = _mp_cross(a, c), _mp_cross(c, d), _mp_cross(d, a)
        Q = _mp_cross(_mp_cross(K_cd, A), _mp_cross(K_da, C))
        third = mpmath.mpf(1) / 3
        G = _mp_frame([[0, 0, 1], [1, 0, 1], [0, 1, 1], [third, third, 1]]) * mpmath.inverse(
            _mp_frame([K_ac, K_cd, K_da, Q]))

        def img(p):
            v = G * mpmath.matrix(p)
            return float(v[0] / v[2]), float(v[1] / v[2])

        outer = [img(p) for p in (_mp_cross(a, b), _mp_cross(b, c), K_cd, K_da)]
        region = [img(p) for p in (A, C, D)]
    return QuadPiece("ACD", ConvexPolygonDomain.from_points(outer, tol=0.0),
                     ConvexPolygonDomain.from_points(region, tol=0.0))


def quadrilateral_pieces(params: QuadParams) -> list[QuadPiece]:
    """ABC (normalized chart) and ACD (its own flag chart), whose areas add up to ABCD.

    When D lies closer to C than to A the reflected configuration is used;
    the reflection is a projective symmetry, so the areas are unchanged.
    """
    mu, nu = params.mu, params.nu
    if math.hypot(mu, nu - 2.0) < math.hypot(mu, nu):
        params = reflect(params)
    cfg = build_configuration(params)
    abc = ConvexPolygonDomain(np.array([cfg.points[k].to_affine() for k in "ABC"]))
    return [QuadPiece("ABC", cfg.outer, abc), _acd_chart(params)]
