"""Naive and canonical heights, the height pairing, and numerical checks of
endomorphism identities.

Normalization: ``h(P) = 1/2 * lim 4^-n h_x(2^n P)`` where ``h_x`` is the
absolute logarithmic height of the x-coordinate, and
``<P, Q> = h(P + Q) - h(P) - h(Q)`` so that ``<P, P> = 2 h(P)``.

The limit is evaluated by exact x-only doubling on an integral model.  The
numerator/denominator pair (A : B) is kept coprime in the ring of integers;
the gcd produced by one doubling step divides Disc^2, so it is found with
small Euclidean divisions only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .curves import EllipticCurve, CurvePoint
from .endos import EndoMap, apply_endo, apply_adjoint
from .fields import (
    FieldElement,
    coprime_fraction,
    exact_div,
    log_abs_embeddings,
    ring_gcd_bounded,
)

DEFAULT_TOL = 1e-4
DEFAULT_CAP = 10
MIN_TOL = 1e-8
TORSION_BOUND = 24
SAFETY = 4.0
# floor for reported error bounds (double rounding in the logs)
ERROR_FLOOR = 1e-12


@dataclass(frozen=True)
class HeightValue:
    value: float
    error_bound: float
    doublings: int = 0

    def __post_init__(self):
        if not (self.error_bound > 0 and math.isfinite(self.error_bound)):
            raise ValueError("error_bound must be positive and finite")


class DoublingCapExceeded(RuntimeError):
    """Tolerance not met within the doubling cap; ``estimate`` is the best
    value found, with its (larger) error bound."""

    def __init__(self, estimate: HeightValue, tol: float):
        super().__init__(
            f"tolerance {tol:g} not reached after {estimate.doublings} doublings "
            f"(estimate {estimate.value!r} +- {estimate.error_bound:.3g})"
        )
        self.estimate = estimate
        self.tol = tol


# -- naive height ---------------------------------------------------------------

def naive_height_pair(A: FieldElement, B: FieldElement) -> float:
    """(1/[K:Q]) sum_sigma log max(|sigma A|, |sigma B|) for coprime integral A, B."""
    la = log_abs_embeddings(A) if A else None
    lb = log_abs_embeddings(B) if B else None
    if la is None:
        terms = lb
    elif lb is None:
        terms = la
    else:
        terms = [max(u, v) for u, v in zip(la, lb)]
    return sum(terms) / len(terms)


def naive_x_height(E: EllipticCurve, P: CurvePoint) -> float:
    if P.is_infinity:
        raise ValueError("naive x-height of the point at infinity")
    A, B = coprime_fraction(P.x)
    return naive_height_pair(A, B)


# -- canonical height -------------------------------------------------------------

def _doubling_forms(E: EllipticCurve):
    b2, b4, b6, b8 = E.b_invariants()

    def step(A: FieldElement, B: FieldElement):
        A2, B2 = A * A, B * B
        AB = A * B
        B3 = B2 * B
        num = A2 * A2 - b4 * A2 * B2 - 2 * b6 * A * B3 - b8 * B2 * B2
        den = 4 * A2 * AB + b2 * A2 * B2 + 2 * b4 * AB * B2 + b6 * B2 * B2
        return num, den

    return step


def partial_limits(E: EllipticCurve, P: CurvePoint, cap: int):
    """Yield (n, 1/2 * 4^-n * h_x(2^n P)) for n = 0..cap.

    Assumes P is non-torsion (no 2^n P is the point at infinity).
    """
    u = E.integral_scaling()
    model = E.scaled(u) if u != 1 else E
    x = P.x * (u * u)
    A, B = coprime_fraction(x)
    disc = model.discriminant()
    bound = disc * disc
    step = _doubling_forms(model)
    yield 0, 0.5 * naive_height_pair(A, B)
    for n in range(1, cap + 1):
        num, den = step(A, B)
        if not den:
            raise ZeroDivisionError("hit a 2-torsion point while doubling")
        g = ring_gcd_bounded(num, den, bound)
        A, B = exact_div(num, g), exact_div(den, g)
        yield n, 0.5 * naive_height_pair(A, B) / 4 ** n


def canonical_height(E: EllipticCurve, P: CurvePoint, tol: float = DEFAULT_TOL,
                     cap: int = DEFAULT_CAP) -> HeightValue:
    """Canonical height by the doubling limit.

    Each telescoping increment L_k - L_{k-1} equals (h(2Q) - 4h(Q)) / (2 * 4^k)
    for Q = 2^(k-1) P, so ``c = max_k 2 * 4^k |L_k - L_{k-1}|`` estimates the
    per-step defect and the remaining tail is about ``c / (6 * 4^n)``.  Iteration
    stops once that tail drops below tol/2 (n >= 2); the reported error bound
    is SAFETY times the tail.  Torsion points (mP = O for some m <= 24) get
    exactly 0.
    """
    if tol < MIN_TOL:
        raise ValueError(f"tol must be at least {MIN_TOL}")
    E.check(P)
    return _canonical_height_cached(E, P, float(tol), int(cap))


@lru_cache(maxsize=4096)
def _canonical_height_cached(E: EllipticCurve, P: CurvePoint, tol: float, cap: int) -> HeightValue:
    if P.is_infinity or E.torsion_order(P, TORSION_BOUND) is not None:
        return HeightValue(0.0, ERROR_FLOOR, 0)
    prev = None
    defect = 0.0
    best = None
    for n, L in partial_limits(E, P, cap):
        if prev is not None:
            defect = max(defect, 2 * 4 ** n * abs(L - prev))
            tail = defect / (6 * 4 ** n)
            best = HeightValue(L, max(SAFETY * tail, ERROR_FLOOR), n)
            if n >= 2 and tail < tol / 2:
                return best
        prev = L
    if best is None:
        best = HeightValue(prev, 1.0, 0)
    raise DoublingCapExceeded(best, tol)


def height_or_estimate(E, P, tol=DEFAULT_TOL, cap=DEFAULT_CAP) -> tuple[HeightValue, bool]:
    """(value, converged) -- the cap-limited estimate instead of an exception."""
    try:
        return canonical_height(E, P, tol, cap), True
    except DoublingCapExceeded as exc:
        return exc.estimate, False


def pairing(E: EllipticCurve, P: CurvePoint, Q: CurvePoint, tol: float = DEFAULT_TOL,
            cap: int = DEFAULT_CAP) -> HeightValue:
    """<P, Q> = h(P + Q) - h(P) - h(Q)."""
    hpq = canonical_height(E, E.add(P, Q), tol, cap)
    hp = canonical_height(E, P, tol, cap)
    hq = canonical_height(E, Q, tol, cap)
    return HeightValue(hpq.value - hp.value - hq.value,
                       hpq.error_bound + hp.error_bound + hq.error_bound)


@dataclass(frozen=True)
class GramMeasurement:
    points: tuple[CurvePoint, ...]
    matrix: tuple[tuple[float, ...], ...]
    error_bound: float

    def upper_values(self) -> list[float]:
        r = len(self.points) if self.points else len(self.matrix)
        return [self.matrix[i][j] for i in range(r) for j in range(i, r)]


def gram_matrix(E: EllipticCurve, points: Sequence[CurvePoint], tol: float = DEFAULT_TOL,
                cap: int = DEFAULT_CAP) -> GramMeasurement:
    r = len(points)
    M = [[0.0] * r for _ in range(r)]
    err = 0.0
    for i in range(r):
        h = canonical_height(E, points[i], tol, cap)
        M[i][i] = 2 * h.value
        err = max(err, 2 * h.error_bound)
        for j in range(i + 1, r):
            p = pairing(E, points[i], points[j], tol, cap)
            M[i][j] = M[j][i] = p.value
            err = max(err, p.error_bound)
    return GramMeasurement(tuple(points), tuple(tuple(row) for row in M), max(err, ERROR_FLOOR))


# -- endomorphism checks -------------------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    """``ok`` means every individual residual is within its own budget;
    ``budget`` is the largest per-item budget."""

    max_residual: float
    budget: float
    ok: bool
    details: tuple = field(default=())


def adjoint_check(E: EllipticCurve, f: EndoMap, points: Sequence[CurvePoint],
                  tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP,
                  endos: Sequence[EndoMap] = ()) -> ResidualReport:
    """max over pairs of |<fP, Q> - <P, f'Q>| against the summed error bounds."""
    worst, budget, ok = 0.0, 0.0, True
    rows = []
    for i, P in enumerate(points):
        fP = apply_endo(E, f, P)
        for j, Q in enumerate(points):
            fQ = apply_adjoint(E, f, Q, endos)
            lhs = pairing(E, fP, Q, tol, cap)
            rhs = pairing(E, P, fQ, tol, cap)
            res = abs(lhs.value - rhs.value)
            bud = lhs.error_bound + rhs.error_bound
            rows.append((i, j, lhs.value, rhs.value, res, bud))
            worst = max(worst, res)
            budget = max(budget, bud)
            ok = ok and res <= bud
    return ResidualReport(worst, budget, ok, tuple(rows))


def degree_scaling_check(E: EllipticCurve, f: EndoMap, points: Sequence[CurvePoint],
                         tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP) -> ResidualReport:
    """max over P of |h(fP) - deg(f) h(P)|."""
    if f.degree is None:
        raise ValueError("endomorphism has no declared degree")
    worst, budget, ok = 0.0, 0.0, True
    rows = []
    for i, P in enumerate(points):
        hf = canonical_height(E, apply_endo(E, f, P), tol, cap)
        h = canonical_height(E, P, tol, cap)
        res = abs(hf.value - f.degree * h.value)
        bud = hf.error_bound + f.degree * h.error_bound
        rows.append((i, hf.value, h.value, res, bud))
        worst = max(worst, res)
        budget = max(budget, bud)
        ok = ok and res <= bud
    return ResidualReport(worst, budget, ok, tuple(rows))

