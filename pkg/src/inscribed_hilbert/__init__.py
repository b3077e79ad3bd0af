"""Hilbert geometry of polygons inscribed in convex domains."""

from .convex_domains import (ConvexDomain, ConvexPolygonDomain, DomainError, EllipseDomain,
                             inscribe_check, rectangle, square)
from .experiments import (DegenerationPath, GSpec, quadrilateral_area, run_bulge_counterexample,
                          run_case_sweep, run_degeneration, run_triangle_table)
from .fock_goncharov import (QuadParams, build_configuration, central_q, classify_degeneration,
                             d_from_wz, wz_from_d, y_invariant)
from .hilbert import QuadratureConfig, busemann_density, hilbert_distance
from .invariants import run_invariant_suite
from .quadrature import AreaResult, region_area

__version__ = "0.1.0"
