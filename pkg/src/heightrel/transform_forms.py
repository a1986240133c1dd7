"""Transformation matrices of heights under an endomorphism.

Symmetric line bundles L_1..L_s are represented by their images in the
symmetric space S (first basis element = 1 = the polarization).  Row i of the
transformation matrix expresses phi' s_i phi in the S-basis, so that
``h_{L_i}(phi P) = sum_j alpha[i][j] h_{L_j}(P)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .endo_algebra import (
    AlgebraElement,
    InvolutiveAlgebra,
    SymmetricSpace,
    deg_exponent,
    fixed_space,
    n_map,
    norm_form,
)
from .exact_linalg import QMatrix, determinant


class DeterminantMismatch(AssertionError):
    def __init__(self, det: Fraction, expected: Fraction):
        super().__init__(f"det = {det} but deg^(s/g) = {expected}")
        self.det = det
        self.expected = expected


@dataclass(frozen=True)
class TransformMatrix:
    entries: QMatrix
    phi: AlgebraElement
    g: int

    @property
    def s(self) -> int:
        return self.entries.rows


@dataclass(frozen=True)
class DetCheck:
    ok: bool
    det: Fraction
    expected: Fraction


def alpha_matrix(A: InvolutiveAlgebra, S: SymmetricSpace | None, phi: AlgebraElement, g: int,
                 check: bool = True) -> TransformMatrix:
    S = S or fixed_space(A)
    tm = TransformMatrix(n_map(A, S, phi).transpose(), phi, g)
    if check:
        res = det_check(tm, A, g)
        if not res.ok:
            raise DeterminantMismatch(res.det, res.expected)
    return tm


def expected_det(A: InvolutiveAlgebra, s: int, g: int, phi: AlgebraElement) -> Fraction:
    """deg(phi)^(s/g) computed as norm^(2s/m) without taking roots."""
    deg_exponent(A, g)  # validates that deg exists in dimension g
    value, m = norm_form(A, phi)
    if (2 * s) % m:
        raise ValueError(f"2s={2 * s} not divisible by norm degree {m}")
    return value ** (2 * s // m)


def det_check(tm: TransformMatrix, A: InvolutiveAlgebra, g: int) -> DetCheck:
    det = determinant(tm.entries)
    expected = expected_det(A, tm.s, g, tm.phi)
    return DetCheck(det == expected, det, expected)


def transform_heights(tm: TransformMatrix, heights: Sequence[float]) -> list[float]:
    if len(heights) != tm.s:
        raise ValueError(f"expected {tm.s} heights, got {len(heights)}")
    return [sum(float(tm.entries[i, j]) * heights[j] for j in range(tm.s)) for i in range(tm.s)]


@dataclass(frozen=True)
class ScalarLocus:
    is_scalar: bool
    factor: Fraction | None


def scalar_locus_check(A: InvolutiveAlgebra, S: SymmetricSpace | None, phi: AlgebraElement,
                       g: int) -> ScalarLocus:
    """Whether h_{L_1} o phi is a rational multiple of h_{L_1}."""
    tm = alpha_matrix(A, S, phi, g)
    row = tm.entries.row(0)
    if any(row[1:]):
        return ScalarLocus(False, None)
    return ScalarLocus(True, row[0])
