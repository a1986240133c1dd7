from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from heightrel.endo_algebra import (
    AlbertKind,
    AlgebraError,
    classify_albert,
    deg,
    fixed_space,
    make_quadratic_field,
    make_quaternion,
    make_rational_field,
    n_map,
    norm_form,
    validate,
)
from heightrel.exact_linalg import QMatrix, determinant

coord = st.integers(-6, 6)


def test_constructors_validate(algebras):
    for A in list(algebras.values()) + [make_rational_field(), make_quadratic_field(-7)]:
        assert validate(A) == []


@pytest.mark.parametrize("kind,eta,alpha", [
    ("I", Fraction(1), Fraction(1)),
    ("II", Fraction(3, 4), Fraction(1, 2)),
    ("III", Fraction(1, 4), Fraction(-1, 2)),
    ("IV", Fraction(1, 2), Fraction(0)),
])
def test_eta_and_albert_type(algebras, kind, eta, alpha):
    A = algebras[kind]
    assert fixed_space(A).eta == eta
    t = classify_albert(A)
    assert t.kind is AlbertKind(kind)
    assert t.alpha == alpha


def test_fixed_space_bases(algebras):
    S = fixed_space(algebras["I"])
    assert [b.coords for b in S.basis] == [(1, 0), (0, 1)]
    assert [b.coords for b in fixed_space(algebras["IV"]).basis] == [(1, 0)]
    assert [b.coords for b in fixed_space(algebras["III"]).basis] == [(1, 0, 0, 0)]
    for A in algebras.values():
        for s in fixed_space(A).basis:
            assert A.involute(s) == s


def test_quadratic_rejections():
    with pytest.raises(AlgebraError):
        make_quadratic_field(4)
    with pytest.raises(AlgebraError):
        make_quadratic_field(1)
    with pytest.raises(AlgebraError):
        make_quadratic_field(-1, "trivial")


def test_validate_reports_broken_involution():
    A = make_quadratic_field(5, "conjugation")
    # w -> w + 1
    bad = replace(A, involution=QMatrix.from_rows([[1, 1], [0, 1]]))
    problems = validate(bad)
    assert any("squared is not the identity" in p for p in problems)


def test_validate_reports_associativity_triple():
    A = make_quaternion(-1, -1)
    sc = [list(map(list, row)) for row in A.structure_constants]
    sc[1][2] = [0, 0, 0, 2]  # i*j = 2k
    bad = replace(A, structure_constants=tuple(tuple(map(tuple, row)) for row in sc))
    problems = validate(bad)
    assert any("basis triple" in p for p in problems)


def test_multiplication_basics():
    A = make_quadratic_field(7, "trivial")
    w = A.element(0, 1)
    assert A.mul(w, w) == A.scalar(7)
    x = A.element(3, -2)
    assert A.mul(A.one(), x) == x
    assert A.left_regular_rep(A.one()) == QMatrix.identity(2)


@given(coord, coord)
def test_deg_examples(a, b):
    A = make_quadratic_field(5, "trivial")
    assert deg(A, 2, A.element(a, b)) == (a * a - 5 * b * b) ** 2
    C = make_quadratic_field(-3)
    assert deg(C, 1, C.element(a, b)) == a * a + 3 * b * b


@pytest.mark.parametrize("kind", ["I", "II", "III", "IV"])
@pytest.mark.parametrize("n", [-2, 3])
def test_deg_of_integer(algebras, kind, n):
    A = algebras[kind]
    for g in (1, 2, 3, 4):
        assert deg(A, g, A.scalar(n)) == n ** (2 * g)


def test_n_map_real_quadratic():
    # column convention: column j is the image of basis element j
    A = make_quadratic_field(5, "trivial")
    S = fixed_space(A)
    for a, b in [(1, 1), (2, -3), (0, 4)]:
        M = n_map(A, S, A.element(a, b))
        assert M.transpose() == QMatrix.from_rows([[a * a + 5 * b * b, 2 * a * b], [10 * a * b, a * a + 5 * b * b]])
    assert n_map(A, S, A.one()) == QMatrix.identity(2)
    assert n_map(A, S, A.scalar(3)) == QMatrix.identity(2).scale(9)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["I", "II", "III", "IV"]), st.lists(coord, min_size=8, max_size=8))
def test_n_map_is_anti_multiplicative_and_det_matches_norm(kind, cs):
    from tests.conftest import builtin_algebras
    A = builtin_algebras()[kind]
    S = fixed_space(A)
    x, y = A.element(*cs[:A.dim]), A.element(*cs[4:4 + A.dim])
    assert n_map(A, S, A.mul(x, y)) == n_map(A, S, y) @ n_map(A, S, x)
    value, m = norm_form(A, x)
    assert determinant(n_map(A, S, x)) == value ** (2 * S.dim // m)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["I", "II", "III", "IV"]), st.lists(coord, min_size=8, max_size=8))
def test_involution_is_anti_automorphism(kind, cs):
    from tests.conftest import builtin_algebras
    A = builtin_algebras()[kind]
    x, y = A.element(*cs[:A.dim]), A.element(*cs[4:4 + A.dim])
    assert A.involute(A.mul(x, y)) == A.mul(A.involute(y), A.involute(x))
    assert A.involute(A.involute(x)) == x
