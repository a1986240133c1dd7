"""Integer relations among measured real values via LLL.

Values are scaled by their largest magnitude before the lattice
``[I_k | round(10^p * v_i / max|v|)]`` is reduced, so a common positive factor
on the inputs does not change the outcome.  A reduced basis vector's first k
coordinates are accepted as a relation m when ``|sum m_i v_i| < k * max|v| *
10^(2 - p)`` and ``max |m_i| <= height_bound``.  The accepted vectors are returned as a
canonical basis of the space they span (reduced echelon form, each row
primitive with a positive leading entry) whenever that basis still meets the
height bound and threshold; otherwise the accepted vectors themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .exact_linalg import IntegerVector, QMatrix, lll_reduce, primitive, rank, rref
from .height_relations import RelationSet

SAFETY_EXPONENT = 2
MIN_PRECISION = 6


@dataclass(frozen=True)
class IntegerRelation:
    coefficients: IntegerVector
    residual: float


class Verdict(str, Enum):
    consistent = "consistent"
    inconsistent = "inconsistent"
    undetermined = "undetermined"


@dataclass(frozen=True)
class RelationReport:
    values: tuple[float, ...]
    detected: tuple[IntegerRelation, ...]
    estimated_span_dim: int
    predicted: RelationSet | None
    verdict: Verdict
    threshold: float
    notes: tuple[str, ...] = ()


def detection_threshold(values: Sequence[float], precision_digits: int) -> float:
    scale = max((abs(v) for v in values), default=0.0)
    return len(values) * scale * 10.0 ** (SAFETY_EXPONENT - precision_digits)


def residual(coefficients: Sequence[int], values: Sequence[float]) -> float:
    return abs(math.fsum(m * v for m, v in zip(coefficients, values)))


def canonical_basis(vectors: Sequence[Sequence[int]]) -> list[IntegerVector]:
    """Reduced echelon basis of the rational span, rows made primitive."""
    if not vectors:
        return []
    rows, _ = rref(QMatrix.from_rows([list(v) for v in vectors]))
    return [primitive(r) for r in rows]


def _check_inputs(values, precision_digits, height_bound):
    if any(not math.isfinite(v) for v in values):
        raise ValueError("values must be finite")
    if precision_digits < MIN_PRECISION:
        raise ValueError(f"precision_digits must be at least {MIN_PRECISION}")
    if height_bound < 1:
        raise ValueError("height_bound must be at least 1")


def find_relations(values: Sequence[float], precision_digits: int = 12,
                   height_bound: int = 100) -> list[IntegerRelation]:
    values = [float(v) for v in values]
    _check_inputs(values, precision_digits, height_bound)
    k = len(values)
    scale = max((abs(v) for v in values), default=0.0)
    if k == 0:
        return []
    if scale == 0.0:
        # every coordinate vector is an exact relation
        return [IntegerRelation(tuple(1 if i == j else 0 for j in range(k)), 0.0) for i in range(k)]
    threshold = detection_threshold(values, precision_digits)
    big = 10 ** precision_digits
    lattice = []
    for i, v in enumerate(values):
        row = [0] * (k + 1)
        row[i] = 1
        row[k] = int(round(Fraction(v) / Fraction(scale) * big))
        lattice.append(row)
    reduced = lll_reduce(lattice)

    accepted: list[IntegerVector] = []
    for vec in reduced:
        m = vec[:k]
        if not any(m) or max(abs(c) for c in m) > height_bound:
            continue
        if residual(m, values) >= threshold:
            continue
        if accepted and rank(QMatrix.from_rows(list(accepted) + [list(m)])) == len(accepted):
            continue
        accepted.append(tuple(m))

    # prefer the echelon basis of the span; keep the reduced vectors themselves
    # when echelon form would break the height bound or the residual threshold
    basis = canonical_basis(accepted)
    if any(max(abs(c) for c in m) > height_bound or residual(m, values) >= threshold for m in basis):
        basis = [primitive(m) for m in accepted]
    return [IntegerRelation(m, residual(m, values)) for m in basis]


def estimate_span_dim(values: Sequence[float], precision_digits: int = 12,
                      height_bound: int = 100) -> int:
    return len(values) - len(find_relations(values, precision_digits, height_bound))


def _in_span(basis: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    if not basis:
        return not any(v)
    return rank(QMatrix.from_rows([list(b) for b in basis] + [list(v)])) == \
        rank(QMatrix.from_rows([list(b) for b in basis]))


def compare_with_prediction(gm, predicted: RelationSet, precision_digits: int = 12,
                            height_bound: int = 100) -> RelationReport:
    """Run :func:`compare_values` on the upper-triangular entries of a
    GramMeasurement, which must be ordered as ``predicted.labels``."""
    return compare_values(gm.upper_values(), predicted, gm.error_bound, precision_digits, height_bound)


def compare_values(values: Sequence[float], predicted: RelationSet, error_bound: float,
                   precision_digits: int = 12, height_bound: int = 100) -> RelationReport:
    """Match detected relations against a predicted relation space.

    Consistent means the detected and predicted spans coincide and
    every predicted relation is small on the data; undetermined means the
    measurement error exceeds what the detector can resolve.
    """
    values = [float(v) for v in values]
    if len(values) != len(predicted.labels):
        raise ValueError(f"{len(values)} values for {len(predicted.labels)} labels")
    for rel in predicted.relations:
        if len(rel) != len(values):
            raise ValueError("predicted relation length does not match the labels")
    threshold = detection_threshold(values, precision_digits)
    detected = find_relations(values, precision_digits, height_bound)
    span_dim = len(values) - len(detected)
    if error_bound > threshold:
        return RelationReport(tuple(values), tuple(detected), span_dim, predicted,
                              Verdict.undetermined, threshold,
                              (f"measurement error {error_bound:.3g} exceeds detection threshold {threshold:.3g}",))
    notes = []
    det_vecs = [r.coefficients for r in detected]
    for rel in predicted.relations:
        bound = max(threshold, sum(abs(c) for c in rel) * error_bound)
        res = residual(rel, values)
        if res > bound:
            notes.append(f"predicted relation {rel} has residual {res:.3g} > {bound:.3g}")
        elif not _in_span(det_vecs, rel):
            notes.append(f"predicted relation {rel} was not detected")
    for m in det_vecs:
        if not _in_span(predicted.relations, m):
            notes.append(f"detected relation {m} is outside the predicted span")
    verdict = Verdict.inconsistent if notes else Verdict.consistent
    return RelationReport(tuple(values), tuple(detected), span_dim, predicted, verdict, threshold, tuple(notes))
