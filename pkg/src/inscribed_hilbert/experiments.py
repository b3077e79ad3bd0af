"""Experiment drivers: triangle tables, degeneration paths, catalog sweeps.

Every sample is a quadrilateral configuration in the normalized chart; its
Hilbert area is computed as the sum of the areas of ABC and ACD, each in a
well-conditioned chart (see ``fock_goncharov.quadrilateral_pieces``).  The
direct route, integrating over ABCD inside abcd in one chart, is kept for
cross-checks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fock_goncharov as fg
from .hilbert import DEFAULT_CONFIG, QuadratureConfig
from .projective import PreconditionError
from .quadrature import AreaResult, region_area
from .special import key_integral_closed_form

log = logging.getLogger(__name__)

BURN_IN = 0.25
COMPARABILITY_BOUND = 10.0
CSV_COLUMNS = ("x", "mu", "nu", "W", "Z", "Q", "area", "area_err", "evals", "converged", "u", "v")


def quadrilateral_area(params: fg.QuadParams, cfg: QuadratureConfig = DEFAULT_CONFIG,
                       method: str = "split") -> AreaResult:
    """Hilbert area of ABCD inside abcd for the given parameters.

    ``method="split"`` adds the areas of ABC and ACD computed in separate
    charts; ``method="direct"`` integrates ABCD in the normalized chart,
    which loses accuracy once D is close to the boundary of the moduli
    triangle.
    """
    if method == "direct":
        conf = fg.build_configuration(params)
        return region_area(conf.outer, conf.inner, cfg)
    if method != "split":
        raise ValueError(f"unknown area method {method!r}")
    parts = [region_area(p.outer, p.region, cfg) for p in fg.quadrilateral_pieces(params)]
    return AreaResult(
        value=math.fsum(r.value for r in parts),
        error_estimate=math.fsum(r.error_estimate for r in parts),
        evaluations=sum(r.evaluations for r in parts),
        converged=all(r.converged for r in parts),
        divergent=any(r.divergent for r in parts),
        cells=sum(r.cells for r in parts),
    )


# ---------------------------------------------------------------- triangles

def triangle_chart_tau(T: float) -> float:
    """Parameter tau of the chart A=(1,0), B=(1,1), C=(0,tau) in the triangle
    x=0, y=0, x+y=2, where the triple ratio is (2-tau)/tau.

    Values T < 1 use the reciprocal, which has the same area.
    """
    if not T > 0:
        raise PreconditionError("T must be positive")
    T = max(T, 1.0 / T)
    return 2.0 / (1.0 + T)


def comparison_lower_bound(T: float) -> float:
    """(pi/16) times the comparison integral over the chart triangle for T."""
    return math.pi / 16.0 * key_integral_closed_form(triangle_chart_tau(T))


@dataclass
class TriangleRow:
    T: float
    area: AreaResult
    ratio: float
    lower_bound: float

    def to_dict(self) -> dict:
        return {"T": self.T, "area": self.area.value, "area_err": self.area.error_estimate,
                "ratio": self.ratio, "lower_bound": self.lower_bound,
                "evals": self.area.evaluations, "converged": self.area.converged}


def run_triangle_table(T_values, cfg: QuadratureConfig = DEFAULT_CONFIG) -> list[TriangleRow]:
    """Area of the inscribed triangle with triple ratio T, for each T.

    ``ratio`` is area / (1 + (log T)^2).  Non-converged rows are kept with
    ``area.converged == False``.
    """
    rows = []
    for T in T_values:
        T = float(T)
        outer, inner = fg.triangle_domains(T)
        res = region_area(outer, inner, cfg)
        lt = math.log(T)
        rows.append(TriangleRow(T, res, res.value / (1.0 + lt * lt), comparison_lower_bound(T)))
        log.info("triangle T=%g area=%.6g (+-%.2g)", T, res.value, res.error_estimate)
    return rows


# ---------------------------------------------------------------- paths

def _g_family(family: str, param: float) -> Callable[[float], float]:
    if family == "constant":
        if param < 0:
            raise PreconditionError("constant g needs c >= 0")
        if param == 0:
            # g = 0 puts D on the line a; approach it with g -> 0 instead
            return lambda x: 1.0 / math.log(1.0 / x)
        return lambda x: param
    if family == "loglog":
        return lambda x: math.log(math.log(1.0 / x))
    raise PreconditionError(f"unknown g family {family!r}")


@dataclass(frozen=True)
class GSpec:
    """Graph family.  D = (-x, f(x)) with

    * ``constant`` : f = x (1 + c / log(1/x)), so ``q_graph`` is c and
      ``central_q`` is c/2 (c = 0 uses g = 1/log(1/x))
    * ``loglog``   : f = x (1 + g / log(1/x)) with g = log log (1/x)
    * ``power``    : f = x + x^(1+eps)
    """

    family: str = "constant"
    param: float = 0.0

    def __post_init__(self):
        if self.family == "power":
            if not self.param > 0:
                raise PreconditionError("power family needs eps > 0")
        else:
            _g_family(self.family, self.param)

    def excess(self, x: float) -> float:
        """f(x) - x, computed without cancellation."""
        if self.family == "power":
            return x ** (1.0 + self.param)
        return x * _g_family(self.family, self.param)(x) / math.log(1.0 / x)

    def f(self, x: float) -> float:
        return x + self.excess(x)

    def label(self) -> str:
        return self.family if self.family == "loglog" else f"{self.family}:{self.param:g}"


def bulge_ray(k: float) -> tuple[float, float]:
    """(W, Z) = (e^(k(1+d)), e^k) with d = 6/sqrt(k)."""
    d = 6.0 / math.sqrt(k)
    return math.exp(k * (1.0 + d)), math.exp(k)


@dataclass(frozen=True)
class DegenerationPath:
    """A one-parameter family of configurations.

    kind : ``"graph"`` (parameter x, D = (-x, f(x))), ``"wz-sequence"``
        (parameter k, (W, Z) = ``wz(k)``) or ``"bulge-ray"`` (parameter k,
        see ``bulge_ray``)
    samples : number of samples, at least 8
    range : (lo, hi) parameter interval; graph paths are sampled
        geometrically from hi down to lo, sequences from lo up to hi
    spacing : ``"geometric"`` or ``"linear"`` for sequence kinds
    """

    kind: str = "graph"
    samples: int = 20
    range: tuple[float, float] = (1e-2 * 0.5**19, 1e-2)
    g: GSpec = field(default_factory=GSpec)
    wz: Callable[[float], tuple[float, float]] | None = None
    spacing: str = "geometric"

    def __post_init__(self):
        if self.kind not in ("graph", "wz-sequence", "bulge-ray"):
            raise PreconditionError(f"unknown path kind {self.kind!r}")
        if self.samples < 8:
            raise PreconditionError("a path needs at least 8 samples")
        lo, hi = self.range
        if not lo < hi:
            raise PreconditionError("range endpoints must satisfy lo < hi")
        if self.kind == "graph" and not (0.0 < lo and hi < math.exp(-1.0)):
            # log log (1/x) > 0 and f(x) stays below the line c
            raise PreconditionError("graph paths need 0 < x < 1/e")
        if self.kind == "wz-sequence" and self.wz is None:
            raise PreconditionError("wz-sequence paths need a wz function")
        if self.spacing not in ("geometric", "linear"):
            raise PreconditionError(f"unknown spacing {self.spacing!r}")

    @classmethod
    def graph(cls, family: str, param: float = 0.0, samples: int = 20, x0: float = 1e-2,
              ratio: float = 0.5) -> "DegenerationPath":
        """Graph path sampled at x_k = x0 r^k."""
        if not 0.0 < ratio < 1.0:
            raise PreconditionError("ratio must lie in (0, 1)")
        return cls("graph", samples, (x0 * ratio ** (samples - 1), x0), GSpec(family, param))

    def parameters(self) -> np.ndarray:
        lo, hi = self.range
        if self.kind == "graph":
            return np.geomspace(hi, lo, self.samples)
        if self.spacing == "linear":
            return np.linspace(lo, hi, self.samples)
        return np.geomspace(lo, hi, self.samples)

    def point(self, t: float, T: float, Y: float) -> tuple[float, float, fg.QuadParams]:
        """(mu, nu, params) at parameter t."""
        if self.kind == "graph":
            x = float(t)
            e = self.g.excess(x)
            W = (2.0 - 2.0 * x - e) / (2.0 * x)
            Z = 2.0 * x / e
            return -x, x + e, fg.QuadParams(W, Z, T, Y)
        W, Z = bulge_ray(t) if self.kind == "bulge-ray" else self.wz(t)
        p = fg.QuadParams(W, Z, T, Y)
        return p.mu, p.nu, p


@dataclass
class DegenerationRecord:
    x: float
    mu: float
    nu: float
    W: float
    Z: float
    Q: float
    area: AreaResult | None
    u: float
    v: float
    T: float = 1.0
    Y: float = 1.0
    flag: str | None = None

    @property
    def usable(self) -> bool:
        return self.area is not None and self.area.converged and math.isfinite(self.area.value)

    @property
    def Q_C(self) -> float:
        """Central quantity of the reflected configuration (the analog at C)."""
        return fg.central_q(1.0 / self.Z, 1.0 / self.W)

    def row(self) -> list:
        a = self.area
        return [self.x, self.mu, self.nu, self.W, self.Z, self.Q,
                a.value if a else math.nan, a.error_estimate if a else math.nan,
                a.evaluations if a else 0, bool(a and a.converged), self.u, self.v]

    def to_dict(self) -> dict:
        d = dict(zip(CSV_COLUMNS, self.row()))
        d.update(T=self.T, Y=self.Y, Q_C=self.Q_C, flag=self.flag,
                 divergent=bool(self.area and self.area.divergent))
        return d


@dataclass
class PathSummary:
    """Tail statistics of area / (1 + Q) after burn-in."""

    burn_in: int
    tail_samples: int
    ratio_min: float
    ratio_max: float
    tail_mean_area: float
    area_min: float
    area_max: float
    divergence_flagged: bool
    growing: bool
    bound: float = COMPARABILITY_BOUND

    @property
    def ratio_band(self) -> float:
        return self.ratio_max / self.ratio_min if self.ratio_min > 0 else math.inf

    @property
    def area_band(self) -> float:
        return self.area_max / self.area_min if self.area_min > 0 else math.inf

    @property
    def comparable(self) -> bool:
        return self.ratio_band <= self.bound

    @property
    def divergent(self) -> bool:
        """Quadrature divergence together with growth between samples."""
        return self.divergence_flagged and self.growing

    def to_dict(self) -> dict:
        return {"burn_in": self.burn_in, "tail_samples": self.tail_samples,
                "ratio_min": self.ratio_min, "ratio_max": self.ratio_max,
                "ratio_band": self.ratio_band, "comparable": self.comparable, "bound": self.bound,
                "tail_mean_area": self.tail_mean_area, "area_band": self.area_band,
                "divergence_flagged": self.divergence_flagged, "growing": self.growing,
                "divergent": self.divergent}


@dataclass
class DegenerationRun:
    path: DegenerationPath
    records: list[DegenerationRecord]
    summary: PathSummary

    def tail(self) -> list[DegenerationRecord]:
        return self.records[self.summary.burn_in:]

    def rows(self) -> list[list]:
        return [r.row() for r in self.records]


def _growing(records: list[DegenerationRecord], log_scale: Callable[[DegenerationRecord], float]) -> bool:
    """Areas increase at every step and do not level off on a log scale.

    The slope of area against ``log_scale`` over the last third of the
    samples must be at least half the slope over the first third.
    """
    rs = [r for r in records if r.usable]
    if len(rs) < 3:
        return False
    a = np.array([r.area.value for r in rs])
    e = np.array([r.area.error_estimate for r in rs])
    s = np.array([log_scale(r) for r in rs])
    if np.any(np.diff(a) <= 2.0 * (e[1:] + e[:-1])):
        return False
    k = max(2, len(rs) // 3)
    first = (a[k - 1] - a[0]) / (s[k - 1] - s[0])
    last = (a[-1] - a[-k]) / (s[-1] - s[-k])
    return bool(first > 0 and last >= 0.5 * first)


def summarize(records: list[DegenerationRecord], bound: float = COMPARABILITY_BOUND,
              log_scale: Callable[[DegenerationRecord], float] | None = None) -> PathSummary:
    burn = int(math.floor(BURN_IN * len(records)))
    tail = [r for r in records[burn:] if r.usable]
    ratios = [r.area.value / (1.0 + r.Q) for r in tail]
    areas = [r.area.value for r in tail]
    flagged = any(r.area is not None and r.area.divergent for r in records[burn:])
    if log_scale is None:
        log_scale = lambda r: -math.log(abs(r.x))  # noqa: E731
    return PathSummary(
        burn_in=burn, tail_samples=len(tail),
        ratio_min=min(ratios, default=math.nan), ratio_max=max(ratios, default=math.nan),
        tail_mean_area=float(np.mean(areas)) if areas else math.nan,
        area_min=min(areas, default=math.nan), area_max=max(areas, default=math.nan),
        divergence_flagged=flagged, growing=_growing(records[burn:], log_scale), bound=bound,
    )


def _sample(path: DegenerationPath, t: float, T: float, Y: float, cfg: QuadratureConfig,
            ref: tuple[float, float], method: str) -> DegenerationRecord:
    try:
        mu, nu, p = path.point(t, T, Y)
    except PreconditionError as exc:
        log.warning("sample %g: %s", t, exc)
        nan = math.nan
        return DegenerationRecord(float(t), nan, nan, nan, nan, nan, None, nan, nan, T, Y, str(exc))
    tb = fg.TwistBulge.between(ref[0], ref[1], p.W, p.Z)
    rec = DegenerationRecord(float(t), mu, nu, p.W, p.Z, fg.central_q(p.W, p.Z), None,
                             tb.u, tb.v, T, Y)
    try:
        rec.area = quadrilateral_area(p, cfg, method)
    except PreconditionError as exc:
        log.warning("sample %g: %s", t, exc)
        rec.flag = str(exc)
    log.info("sample %.6g Q=%.4g area=%s", t, rec.Q, rec.area and f"{rec.area.value:.6g}")
    return rec


def run_degeneration(path: DegenerationPath, T: float = 1.0, Y: float = 1.0,
                     cfg: QuadratureConfig = DEFAULT_CONFIG, reference: tuple[float, float] = (1.0, 1.0),
                     bound: float = COMPARABILITY_BOUND, method: str = "split") -> DegenerationRun:
    """Area and central quantity along ``path``.

    ``reference`` is the (W0, Z0) from which the twist-bulge coordinates
    (u, v) of each record are measured.  Samples that fail to build carry
    ``flag`` and no area; the run continues.  Records are in path order
    (towards the degeneration).
    """
    if not (T > 0 and Y > 0):
        raise PreconditionError("T and Y must be positive")
    recs = [_sample(path, float(t), T, Y, cfg, reference, method) for t in path.parameters()]
    scale = None
    if path.kind != "graph":
        scale = lambda r: math.log(r.x)  # noqa: E731
    return DegenerationRun(path, recs, summarize(recs, bound, scale))


# ---------------------------------------------------------------- catalog sweeps

def _default_sequence(case: fg.DegenerationCase) -> Callable[[float], tuple[float, float]]:
    """(W, Z) as functions of a scale s -> infinity realizing the case."""
    key = (case.ratio_limit, case.z_limit, case.w_limit)
    R, L = fg.Ratio, fg.Limit
    seqs = {
        (R.TO_INF, L.ZERO, L.ZERO): lambda s: (s**-2, 1 / s),
        (R.TO_INF, L.POS, L.ZERO): lambda s: (1 / s, 1.0),
        (R.TO_INF, L.INF, L.ZERO): lambda s: (1 / s, s),
        (R.TO_INF, L.INF, L.POS): lambda s: (1.0, s),
        (R.TO_INF, L.INF, L.INF): lambda s: (s, s * s),
        (R.TO_ZERO, L.ZERO, L.ZERO): lambda s: (1 / s, s**-2),
        (R.TO_ZERO, L.ZERO, L.POS): lambda s: (1.0, 1 / s),
        (R.TO_ZERO, L.ZERO, L.INF): lambda s: (s, 1 / s),
        (R.TO_ZERO, L.POS, L.INF): lambda s: (s, 1.0),
        (R.TO_ZERO, L.INF, L.INF): lambda s: (s * s, s),
    }
    return seqs[key]


@dataclass
class CaseVerdict:
    case: fg.DegenerationCase
    observed_limit: fg.Stratum | None
    expected_area: str
    observed_area: str
    q_final: float
    q_c_final: float

    @property
    def matches_catalog(self) -> bool:
        return self.observed_limit == self.case.predicted_limit

    @property
    def matches_formula(self) -> bool:
        return self.observed_limit in self.case.formula_limit

    @property
    def area_matches(self) -> bool:
        return self.expected_area == self.observed_area

    def to_dict(self) -> dict:
        c = self.case
        return {"case": c.key, "predicted_limit": c.predicted_limit.value,
                "formula_limit": [s.value for s in c.formula_limit],
                "observed_limit": self.observed_limit.value if self.observed_limit else None,
                "matches_catalog": self.matches_catalog, "matches_formula": self.matches_formula,
                "q_bounded": c.q_bounded.value, "expected_area": self.expected_area,
                "observed_area": self.observed_area, "area_matches": self.area_matches,
                "Q_final": self.q_final, "Q_C_final": self.q_c_final}


@dataclass
class CaseSweep:
    run: DegenerationRun
    verdict: CaseVerdict


def _q_trend(values: list[float]) -> str:
    """``"unbounded"`` if the sequence keeps growing past 1, else ``"bounded"``."""
    v = [q for q in values if math.isfinite(q)]
    if len(v) < 3:
        return "bounded"
    tail = v[len(v) // 2:]
    return "unbounded" if tail[-1] > 1.0 and all(b > a for a, b in zip(tail, tail[1:])) else "bounded"


def run_case_sweep(case: fg.DegenerationCase, n: int = 12, cfg: QuadratureConfig = DEFAULT_CONFIG,
                   spacing: str = "geometric", sequence: Callable | None = None,
                   T: float = 1.0, Y: float = 1.0, tol: float = 0.05) -> CaseSweep:
    """Sample a (Z, W) sequence realizing ``case`` and compare with the catalog.

    The default sequences are monomials in a scale s, with s = 2, 4, ...,
    2^n (geometric) or s = 1, ..., n (linear).  ``sequence`` overrides them
    with any s -> (W, Z).  The observed limit is the stratum within ``tol``
    of the last D.  For cases whose area behaviour depends on the rates,
    the expected behaviour follows the central quantity at the vertex D
    approaches (Q at A, its reflection Q_C at C).
    """
    seq = sequence or _default_sequence(case)
    rng = (2.0, 2.0**n) if spacing == "geometric" else (1.0, float(n))
    path = DegenerationPath("wz-sequence", n, rng, wz=seq, spacing=spacing)
    run = run_degeneration(path, T, Y, cfg)
    last = next((r for r in reversed(run.records) if math.isfinite(r.mu)), None)
    observed = fg.stratum_of_point(last.mu, last.nu, tol) if last else None

    if case.q_bounded is fg.QBound.DEPENDS:
        near_c = last is not None and math.hypot(last.mu, last.nu - 2.0) < math.hypot(last.mu, last.nu)
        qs = [r.Q_C if near_c else r.Q for r in run.records if math.isfinite(r.W)]
        expected = _q_trend(qs)
    else:
        expected = case.q_bounded.value
    observed_area = "unbounded" if run.summary.growing or run.summary.divergent else "bounded"
    verdict = CaseVerdict(case, observed, expected, observed_area,
                          last.Q if last else math.nan, last.Q_C if last else math.nan)
    return CaseSweep(run, verdict)


# ---------------------------------------------------------------- bulge sequence

@dataclass
class BulgeVerdict:
    v_final: float
    v_monotone: bool
    area_band: float
    q_max_tail: float
    burn_in: int

    def to_dict(self) -> dict:
        return {"v_final": self.v_final, "v_monotone": self.v_monotone,
                "area_band": self.area_band, "q_max_tail": self.q_max_tail, "burn_in": self.burn_in}


def run_bulge_counterexample(n: int = 16, cfg: QuadratureConfig = DEFAULT_CONFIG,
                             T: float = 1.0, Y: float = 1.0) -> tuple[DegenerationRun, BulgeVerdict]:
    """(Z_k, W_k) = (e^k, e^(k(1+d_k))), d_k = 6/sqrt(k), k = 1..n.

    The bulge coordinate from (1, 1) is v_k = sqrt(k), while Q_k -> 0.
    """
    if n < 8:
        raise PreconditionError("n must be at least 8")
    path = DegenerationPath("bulge-ray", n, (1.0, float(n)), spacing="linear")
    run = run_degeneration(path, T, Y, cfg)
    vs = [r.v for r in run.records]
    tail = run.tail()
    verdict = BulgeVerdict(
        v_final=vs[-1], v_monotone=all(b > a for a, b in zip(vs, vs[1:])),
        area_band=run.summary.area_band, q_max_tail=max(r.Q for r in tail),
        burn_in=run.summary.burn_in)
    return run, verdict
