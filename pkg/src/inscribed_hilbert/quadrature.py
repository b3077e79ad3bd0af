"""Adaptive Hilbert area of a convex polygon inscribed in a convex domain.

The region is fanned into triangles from its vertex centroid, and slender
fan triangles are cut into slabs parallel to their base.  Every cell
carries two estimates of its integral: the 7-point degree-5 rule on the cell
(coarse) and the sum of the same rule over its four midpoint children (fine).
Their difference is the cell's error.  Cells are split greedily by error
until the total error is below ``rel_tol`` times the total.

Region vertices on the boundary of the domain carry integrable singularities.
Midpoint subdivision keeps a corner child at each vertex, so repeated
splitting of those cells is a geometric refinement with ratio 1/2; such
cells get ``corner_depth`` levels beyond ``max_depth``.  The integral of
each annulus (the parent minus its corner child) is logged per vertex: if
it stops decaying the vertex sits on a non-integrable corner and the result
is flagged divergent.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .convex_domains import (ConvexDomain, ConvexPolygonDomain, DomainError,
                             boundary_vertices, edges_on_boundary, inscribe_check,
                             vertices_in_closure)
from .hilbert import DEFAULT_CONFIG, QuadratureConfig, density_unchecked

log = logging.getLogger(__name__)

_S15 = math.sqrt(15.0)
_A = (6.0 - _S15) / 21.0
_B = (6.0 + _S15) / 21.0
_BARY = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [_A, _A, 1 - 2 * _A], [_A, 1 - 2 * _A, _A], [1 - 2 * _A, _A, _A],
    [_B, _B, 1 - 2 * _B], [_B, 1 - 2 * _B, _B], [1 - 2 * _B, _B, _B],
])
_W = np.array([9 / 40] + [(155 - _S15) / 1200] * 3 + [(155 + _S15) / 1200] * 3)

DIVERGENCE_RATIO = 0.9
_FLOOR = 256 * np.finfo(float).eps


@dataclass
class AreaResult:
    """Hilbert area with an absolute error estimate and bookkeeping."""

    value: float
    error_estimate: float
    evaluations: int
    converged: bool
    divergent: bool = False
    cells: int = 0
    corner_ratios: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": self.value, "error_estimate": self.error_estimate,
                "evaluations": self.evaluations, "converged": self.converged,
                "divergent": self.divergent}


def _children(V: np.ndarray) -> np.ndarray:
    """(K, 3, 2) triangles -> (K, 4, 3, 2) midpoint children; child i keeps vertex i."""
    v0, v1, v2 = V[:, 0], V[:, 1], V[:, 2]
    m01, m12, m20 = 0.5 * (v0 + v1), 0.5 * (v1 + v2), 0.5 * (v2 + v0)
    return np.stack([
        np.stack([v0, m01, m20], 1),
        np.stack([m01, v1, m12], 1),
        np.stack([m20, m12, v2], 1),
        np.stack([m12, m20, m01], 1),
    ], 1)


def _tri_area(V: np.ndarray) -> np.ndarray:
    e1 = V[..., 1, :] - V[..., 0, :]
    e2 = V[..., 2, :] - V[..., 0, :]
    return 0.5 * np.abs(e1[..., 0] * e2[..., 1] - e1[..., 1] * e2[..., 0])


class _Integrator:
    def __init__(self, domain: ConvexDomain, cfg: QuadratureConfig):
        self.domain = domain
        self.cfg = cfg
        self.evaluations = 0

    def rule(self, T: np.ndarray) -> np.ndarray:
        """7-point rule on triangles of shape (..., 3, 2)."""
        lead = T.shape[:-2]
        flat = T.reshape(-1, 3, 2)
        pts = np.einsum("qk,tkd->tqd", _BARY, flat)
        vals = density_unchecked(self.domain, pts.reshape(-1, 2)).reshape(len(flat), 7)
        self.evaluations += vals.size
        out = _tri_area(flat) * (vals @ _W)
        out[~np.isfinite(out)] = np.inf
        return out.reshape(lead)


def region_area(domain: ConvexDomain, region: ConvexPolygonDomain,
                cfg: QuadratureConfig = DEFAULT_CONFIG, batch: int = 256) -> AreaResult:
    """Hilbert area of ``region`` with respect to ``domain``.

    Region vertices may touch the boundary.  An edge lying along the
    boundary makes the area infinite; that case, and corners whose annulus
    integrals stop decaying, return ``converged=False, divergent=True``.
    """
    if not isinstance(region, ConvexPolygonDomain):
        raise TypeError("region must be a ConvexPolygonDomain")
    if not inscribe_check(domain, region):
        if vertices_in_closure(domain, region) and _edge_on_boundary(domain, region):
            return AreaResult(math.inf, math.inf, 0, False, True)
        raise DomainError("region is not inscribed in the domain")

    singular = boundary_vertices(domain, region)
    V = region.vertices
    cells, vid = _initial_cells(V, singular)
    n = len(cells)
    depth = np.zeros(n, dtype=int)
    local = np.zeros(n, dtype=int)
    root = np.arange(n)

    integ = _Integrator(domain, cfg)
    coarse = integ.rule(cells)
    kids = integ.rule(_children(cells))
    annuli: dict[tuple[int, int], list[float]] = {}

    while True:
        fine = kids.sum(axis=1)
        err = np.abs(fine - coarse)
        err[~np.isfinite(err)] = np.inf
        total = math.fsum(np.sort(fine))
        total_err = math.fsum(np.sort(err))
        target = cfg.rel_tol * abs(total)
        if total_err <= target:
            converged = True
            break
        is_corner = np.any(vid >= 0, axis=1)
        cap_ok = np.where(is_corner, depth < cfg.max_depth + cfg.corner_depth, local < cfg.max_depth)
        diam = np.max(np.abs(cells[:, 1:] - cells[:, :1]), axis=(1, 2))
        mag = np.max(np.abs(cells), axis=(1, 2))
        splittable = cap_ok & (diam > _FLOOR * mag) & (err > 0)
        if not np.any(splittable) or integ.evaluations >= cfg.max_evaluations:
            converged = False
            break
        idx = np.flatnonzero(splittable)
        idx = idx[np.argsort(-err[idx], kind="stable")]
        csum = np.cumsum(err[idx])
        need = 0.5 * min(csum[-1], total_err - target)
        take = int(np.searchsorted(csum, need)) + 1
        take = max(1, min(take, batch))
        sel = idx[:take]

        # log annulus integrals for single-vertex corner cells
        for j in sel:
            ids = vid[j][vid[j] >= 0]
            if len(ids) == 1:
                pos = int(np.flatnonzero(vid[j] >= 0)[0])
                annuli.setdefault((int(root[j]), int(ids[0])), []).append(float(fine[j] - kids[j, pos]))

        new_cells = _children(cells[sel]).reshape(-1, 3, 2)
        new_coarse = kids[sel].reshape(-1)
        new_vid = np.full((len(sel), 4, 3), -1)
        for pos in range(3):
            new_vid[:, pos, pos] = vid[sel, pos]
        new_vid = new_vid.reshape(-1, 3)
        new_depth = np.repeat(depth[sel] + 1, 4)
        new_local = np.where(np.any(new_vid >= 0, axis=1), 0, np.repeat(local[sel] + 1, 4))
        new_kids = integ.rule(_children(new_cells))

        keep = np.ones(len(cells), dtype=bool)
        keep[sel] = False
        cells = np.concatenate([cells[keep], new_cells])
        coarse = np.concatenate([coarse[keep], new_coarse])
        kids = np.concatenate([kids[keep], new_kids])
        vid = np.concatenate([vid[keep], new_vid])
        depth = np.concatenate([depth[keep], new_depth])
        local = np.concatenate([local[keep], new_local])
        root = np.concatenate([root[keep], np.repeat(root[sel], 4)])

    divergent = False
    ratios = {}
    for key, seq in sorted(annuli.items()):
        if len(seq) >= 4:
            a = np.abs(np.array(seq[-4:]))
            r = a[1:] / np.where(a[:-1] > 0, a[:-1], np.inf)
            ratios[key] = r.tolist()
            if not converged and np.all(r >= DIVERGENCE_RATIO):
                divergent = True
    if not np.isfinite(total):
        divergent = True
    res = AreaResult(total, total_err, integ.evaluations, converged, divergent, len(cells), ratios)
    log.debug("region_area: %s", res)
    return res


def _initial_cells(V: np.ndarray, singular: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Fan from the vertex centroid, with slender fan triangles cut into slabs.

    A fan triangle whose base is short compared to its height is cut by
    lines parallel to the base at geometrically growing distances, so the
    cells next to the region boundary start out roughly isotropic.
    """
    n = len(V)
    G = V.mean(axis=0)
    tris, ids = [], []
    for i in range(n):
        j = (i + 1) % n
        P, Q = V[i], V[j]
        vi = i if singular[i] else -1
        vj = j if singular[j] else -1
        b = float(np.hypot(*(Q - P)))
        e = (Q - P) / b
        H = abs(float((G - P)[0] * e[1] - (G - P)[1] * e[0]))
        lam_prev, P0, Q0 = 0.0, P, Q
        lam = b / H
        while lam < 0.5:
            P1, Q1 = P + lam * (G - P), Q + lam * (G - Q)
            tris += [(P0, Q0, Q1), (P0, Q1, P1)]
            ids += [(vi, vj, -1) if lam_prev == 0.0 else (-1, -1, -1),
                    (vi, -1, -1) if lam_prev == 0.0 else (-1, -1, -1)]
            lam_prev, P0, Q0 = lam, P1, Q1
            lam *= 2.0
        tris.append((P0, Q0, G))
        ids.append((vi, vj, -1) if lam_prev == 0.0 else (-1, -1, -1))
    return np.array(tris, dtype=float), np.array(ids, dtype=int)


def _edge_on_boundary(domain: ConvexDomain, region: ConvexPolygonDomain, tol: float = 1e-9) -> bool:
    return bool(np.any(edges_on_boundary(domain, region, tol)))
