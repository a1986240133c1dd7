"""End-to-end pipelines: algebraic prediction against numerical measurement.

``demo_rm_surface`` builds a synthetic Gram matrix from the pairing shape of a
real quadratic field (random real parameters, fixed seed), so the planted
relations are exactly those the algebra predicts, and checks that the relation
finder recovers them.  ``demo_cm_curve`` measures the adjoint identity and the
degree scaling for the order-4 automorphism of y^2 = x^3 - 5x over Q(i).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .endo_algebra import make_quadratic_field
from .height_relations import (
    RelationSet,
    in_span,
    pairing_shape,
    permuted_shape_relations,
    rm_basis_order,
    theorem1_bound,
    theorem2_relations,
    upper_slots,
)
from .neron_tate import BaseField, EllipticCurve, EndoMap, Poly2, apply_endo
from .neron_tate.heights import (
    DEFAULT_CAP,
    DEFAULT_TOL,
    DoublingCapExceeded,
    GramMeasurement,
    ResidualReport,
    adjoint_check,
    degree_scaling_check,
)
from .relation_finder import RelationReport, Verdict, compare_with_prediction, residual

RM_SEED = 20240607
# doubles carry ~16 digits; 14 leaves room for the Gram entries' rounding
RM_PRECISION_DIGITS = 14
PLANT_TOLERANCE = 1e-10
CORRUPTION = 0.1
CM_RESIDUAL_LIMIT = 1e-3


@dataclass
class DemoResult:
    ok: bool
    verdict: str
    details: dict = field(default_factory=dict)


def rm_gram(D: int, n: int, seed: int = RM_SEED) -> tuple[GramMeasurement, RelationSet]:
    """Synthetic Gram matrix in the basis P_1..P_n, wP_1..wP_n, with the
    full predicted relation set in the same labelling."""
    A = make_quadratic_field(D, "trivial")
    shape = pairing_shape(n, A)
    order = rm_basis_order(n)
    predicted = permuted_shape_relations(shape, order)
    rng = random.Random(seed)
    params = [rng.uniform(0.5, 1.5) for _ in range(shape.param_dim)]
    G = shape.generic(params)
    r = shape.r
    M = tuple(tuple(G[order[a]][order[b]] for b in range(r)) for a in range(r))
    return GramMeasurement((), M, 1e-15), predicted


def _corrupted(gm: GramMeasurement, slot: tuple[int, int]) -> GramMeasurement:
    rows = [list(row) for row in gm.matrix]
    i, j = slot
    rows[i][j] += CORRUPTION
    if i != j:
        rows[j][i] += CORRUPTION
    return GramMeasurement(gm.points, tuple(tuple(r) for r in rows), gm.error_bound)


def demo_rm_surface(D: int = 5, n: int = 1, corrupt: bool = False,
                    seed: int = RM_SEED) -> tuple[DemoResult, RelationReport]:
    A = make_quadratic_field(D, "trivial")
    gm, predicted = rm_gram(D, n, seed)
    thm2 = theorem2_relations(n, D)
    values = gm.upper_values()
    plant_residual = max(residual(rel, values) for rel in predicted.relations)
    if corrupt:
        # perturb the first wP_i diagonal entry, breaking D g_ii = g_(n+i)(n+i)
        gm = _corrupted(gm, (n, n))
    height_bound = max(abs(c) for rel in predicted.relations for c in rel)
    report = compare_with_prediction(gm, predicted, RM_PRECISION_DIGITS, height_bound)
    detected = [rel.coefficients for rel in report.detected]
    bound = theorem1_bound(2 * n, A)
    thm2_in_span = all(in_span(detected, rel) for rel in thm2.relations) if detected else False
    ok = (report.verdict is Verdict.consistent
          and detected == list(predicted.relations)
          and report.estimated_span_dim == bound
          and thm2_in_span
          and plant_residual <= PLANT_TOLERANCE)
    details = {
        "D": D,
        "n": n,
        "corrupted": corrupt,
        "labels": [list(ij) for ij in predicted.labels],
        "predicted": [list(rel) for rel in predicted.relations],
        "detected": [list(rel) for rel in detected],
        "diagonal_relations": [list(rel) for rel in thm2.relations],
        "diagonal_relations_detected": thm2_in_span,
        "estimated_span_dim": report.estimated_span_dim,
        "theorem1_bound": bound,
        "trivial_bound": len(upper_slots(2 * n)),
        "planted_residual": plant_residual,
        "notes": list(report.notes),
    }
    return DemoResult(ok, report.verdict.value, details), report


# -- CM curve ------------------------------------------------------------------

CM_POINTS = (((-1, 0), (2, 0)), ((2, 1), (1, 3)), ((0, 2), (3, -3)))


def cm_curve() -> EllipticCurve:
    return EllipticCurve.from_coefficients([0, 0, 0, -5, 0], BaseField(-1))


def cm_points(E: EllipticCurve | None = None):
    E = E or cm_curve()
    return [E.point(x, y) for x, y in CM_POINTS]


def cm_automorphism(E: EllipticCurve | None = None) -> EndoMap:
    """(x, y) -> (-x, i y); its Rosati adjoint is its inverse, the cube."""
    K = (E or cm_curve()).base
    return EndoMap(
        "[i]",
        x_num=Poly2(((1, 0, K(-1)),)),
        x_den=Poly2.constant(K(1)),
        y_num=Poly2(((0, 1, K(0, 1)),)),
        y_den=Poly2.constant(K(1)),
        degree=1,
        adjoint="self^3",
    )


def _report_dict(rep: ResidualReport) -> dict:
    return {"max_residual": rep.max_residual, "budget": rep.budget, "ok": rep.ok}


def demo_cm_curve(tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP) -> DemoResult:
    E = cm_curve()
    pts = cm_points(E)
    f = cm_automorphism(E)
    order4 = all(_apply_n(E, f, P, 4) == P for P in pts)
    try:
        adj = adjoint_check(E, f, pts, tol, cap)
        scal = degree_scaling_check(E, f, pts, tol, cap)
    except DoublingCapExceeded as exc:
        return DemoResult(False, "undetermined", {
            "tol": tol, "cap": cap, "order_four": order4, "error": str(exc),
            "estimate": exc.estimate.value, "estimate_error_bound": exc.estimate.error_bound,
        })
    ok = (order4 and adj.ok and scal.ok
          and adj.max_residual <= CM_RESIDUAL_LIMIT and scal.max_residual <= CM_RESIDUAL_LIMIT)
    return DemoResult(ok, "consistent" if ok else "inconsistent", {
        "tol": tol,
        "cap": cap,
        "order_four": order4,
        "adjoint": _report_dict(adj),
        "degree_scaling": _report_dict(scal),
        "residual_limit": CM_RESIDUAL_LIMIT,
    })


def _apply_n(E, f, P, k):
    for _ in range(k):
        P = apply_endo(E, f, P)
    return P
