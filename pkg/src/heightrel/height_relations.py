"""Dimension bounds for the Q-span of height-pairing values.

Two independent routes to the same number:

* closed forms (:func:`theorem1_bound`, :func:`dim_T`, :func:`dim_quotient`);
* brute force (:func:`pairing_shape`): solve exactly for every symmetric Gram
  matrix on D^n for which left multiplication by x is adjoint to left
  multiplication by x'.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .endo_algebra import (
    InvolutiveAlgebra,
    classify_albert,
    fixed_space,
    make_quadratic_field,
)
from .exact_linalg import IntegerVector, QMatrix, kernel_vectors, primitive, rref


class RankNotDivisible(ValueError):
    pass


class DerivationError(RuntimeError):
    """An identity that must follow from the pairing shape did not."""


def trivial_bound(r: int) -> int:
    if r < 0:
        raise ValueError("rank must be non-negative")
    return r * (r + 1) // 2


def theorem1_bound(r: int, A: InvolutiveAlgebra) -> int:
    """(r/2)(r/d + alpha) with alpha from the Albert type of A."""
    d = A.dim
    if r < 0 or r % d:
        raise RankNotDivisible(f"rank {r} is not divisible by [D:Q] = {d}")
    value = Fraction(r, 2) * (Fraction(r, d) + classify_albert(A).alpha)
    assert value.denominator == 1 and value >= 0, value
    return int(value)


def dim_T(n: int, A: InvolutiveAlgebra) -> int:
    """dim of {X in M_n(D) : X_ij' = -X_ji}."""
    if n < 0:
        raise ValueError("n must be non-negative")
    d, s = A.dim, fixed_space(A).dim
    return n * (n - 1) // 2 * d + n * (d - s)


def dim_quotient(n: int, A: InvolutiveAlgebra) -> int:
    return n * n * A.dim - dim_T(n, A)


def upper_slots(r: int) -> list[tuple[int, int]]:
    """Upper-triangular entry labels (i, j), i <= j, row-major, 0-based."""
    return [(i, j) for i in range(r) for j in range(i, r)]


@dataclass(frozen=True)
class PairingShape:
    r: int
    n: int
    param_dim: int
    gram_basis: tuple[QMatrix, ...]
    entry_relations: tuple[IntegerVector, ...]

    @property
    def labels(self) -> list[tuple[int, int]]:
        return upper_slots(self.r)

    def generic(self, params) -> list[list]:
        """Gram matrix sum_k params[k] * gram_basis[k] (params may be floats)."""
        out = [[0 for _ in range(self.r)] for _ in range(self.r)]
        for t, G in zip(params, self.gram_basis):
            conv = float if isinstance(t, float) else Fraction
            for i in range(self.r):
                for j in range(self.r):
                    if G[i, j]:
                        out[i][j] += t * conv(G[i, j])
        return out

    def generic_symbolic(self, names: list[str] | None = None) -> list[list[str]]:
        """Each entry as a linear form in named parameters, e.g. ``"5*t2"``."""
        names = names or [f"t{k + 1}" for k in range(self.param_dim)]
        return [[_linear_form([(G[i, j], nm) for G, nm in zip(self.gram_basis, names)])
                 for j in range(self.r)] for i in range(self.r)]


def _linear_form(terms) -> str:
    parts = []
    for c, name in terms:
        if not c:
            continue
        mag = abs(c)
        body = name if mag == 1 else f"{mag}*{name}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts) if parts else "0"


def module_rep(A: InvolutiveAlgebra, n: int, x) -> QMatrix:
    """Left multiplication by x on D^n (block diagonal, block = one D-coordinate)."""
    L = A.left_regular_rep(x)
    return QMatrix.block_diagonal([L] * n)


def adjointness_holds(A: InvolutiveAlgebra, n: int, G: QMatrix, x) -> bool:
    """rho(x)^T G == G rho(x')."""
    rho = module_rep(A, n, x)
    rho_bar = module_rep(A, n, A.involute(x))
    return rho.transpose() @ G == G @ rho_bar


def pairing_shape(n: int, A: InvolutiveAlgebra) -> PairingShape:
    """Solve for all symmetric G on Q^{nd} with rho(x)^T G = G rho(x') for every
    basis element x of A."""
    if n < 1:
        raise ValueError("n must be at least 1")
    r = n * A.dim
    slots = upper_slots(r)
    index = {ij: k for k, ij in enumerate(slots)}

    def slot(i, j):
        return index[(i, j) if i <= j else (j, i)]

    rows: list[list[int]] = []
    for x in A.basis():
        rho = module_rep(A, n, x)
        rho_bar = module_rep(A, n, A.involute(x))
        # (rho^T G)_{ab} - (G rho_bar)_{ab} = sum_c rho_{ca} G_{cb} - G_{ac} rho_bar_{cb}
        for a in range(r):
            for b in range(r):
                row = [Fraction(0)] * len(slots)
                for c in range(r):
                    if rho[c, a]:
                        row[slot(c, b)] += rho[c, a]
                    if rho_bar[c, b]:
                        row[slot(a, c)] -= rho_bar[c, b]
                if any(row):
                    rows.append(row)
    if rows:
        system = QMatrix.from_rows(rows)
        reduced, _ = rref(system)
        params = kernel_vectors(QMatrix.from_rows(reduced)) if reduced else _identity_vectors(len(slots))
    else:
        params = _identity_vectors(len(slots))

    gram_basis = []
    for v in params:
        G = [[Fraction(0)] * r for _ in range(r)]
        for (i, j), val in zip(slots, v):
            G[i][j] = G[j][i] = Fraction(val)
        gram_basis.append(QMatrix.from_rows(G))

    # entries as functions of parameters: E[slot][k] = v_k[slot]; relations = left kernel of E
    if params:
        E_T = QMatrix.from_rows([list(v) for v in params])
        relations = _canonical_relations(kernel_vectors(E_T))
    else:
        relations = _identity_vectors(len(slots))
    return PairingShape(r, n, len(gram_basis), tuple(gram_basis), tuple(relations))


def _identity_vectors(k: int) -> list[IntegerVector]:
    return [tuple(1 if i == j else 0 for j in range(k)) for i in range(k)]


def _canonical_relations(vectors) -> list[IntegerVector]:
    """Reduced echelon basis of the span, each row made primitive."""
    if not vectors:
        return []
    rows, _ = rref(QMatrix.from_rows([list(v) for v in vectors]))
    return [primitive(r) for r in rows]


# -- real multiplication relations ---------------------------------------------

@dataclass(frozen=True)
class RelationSet:
    labels: tuple[tuple[int, int], ...]
    relations: tuple[IntegerVector, ...]


def rm_basis_order(n: int) -> list[int]:
    """Coordinates of D^n (blocks (1, w) per D-coordinate) reordered as
    P_1..P_n, wP_1..wP_n."""
    return [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]


def permuted_shape_relations(shape: PairingShape, order: list[int]) -> RelationSet:
    """Entry relations re-expressed in the basis ``order`` (new index a is old
    index order[a])."""
    r = shape.r
    new_slots = upper_slots(r)
    old_index = {ij: k for k, ij in enumerate(upper_slots(r))}

    def old_slot(a, b):
        i, j = order[a], order[b]
        return old_index[(i, j) if i <= j else (j, i)]

    perm = [old_slot(a, b) for a, b in new_slots]
    rels = [tuple(m[perm[k]] for k in range(len(new_slots))) for m in shape.entry_relations]
    return RelationSet(tuple(new_slots), tuple(_canonical_relations(rels)))


def in_span(vectors, v) -> bool:
    if not vectors:
        return not any(v)
    base = QMatrix.from_rows([list(x) for x in vectors])
    both = QMatrix.from_rows([list(x) for x in vectors] + [list(v)])
    return len(rref(base)[1]) == len(rref(both)[1])


def theorem2_relations(n: int, D: int) -> RelationSet:
    """Relations h(wP_i) = D h(P_i), read off from the pairing shape of the
    real quadratic field Q(sqrt D) acting on D^n.

    For each i the relation space is intersected with the coordinate plane of
    the two diagonal slots (i, i) and (n+i, n+i); the intersection must be the
    single line spanned by ``D g_ii - g_{n+i,n+i}``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if D <= 0:
        raise ValueError("diagonal relations need a real quadratic field (D > 0)")
    A = make_quadratic_field(D, "trivial")
    shape = pairing_shape(n, A)
    full = permuted_shape_relations(shape, rm_basis_order(n))
    labels = list(full.labels)
    out = []
    for i in range(n):
        keep = [labels.index((i, i)), labels.index((n + i, n + i))]
        other = [k for k in range(len(labels)) if k not in keep]
        # combinations c of relation rows whose support lies inside `keep`
        M = QMatrix.from_rows([[rel[k] for rel in full.relations] for k in other])
        combos = kernel_vectors(M)
        restricted = []
        for c in combos:
            vec = [sum(ci * rel[k] for ci, rel in zip(c, full.relations)) for k in range(len(labels))]
            if any(vec):
                restricted.append(vec)
        if len(restricted) != 1:
            raise DerivationError(f"expected one relation on slots {keep}, found {len(restricted)}")
        rel = primitive(restricted[0])
        if (rel[keep[0]], rel[keep[1]]) != (D, -1):
            raise DerivationError(f"derived relation {rel} is not D*g_ii - g_(n+i)(n+i)")
        if not in_span(full.relations, rel):
            raise DerivationError("derived relation is not implied by the pairing shape")
        out.append(rel)
    return RelationSet(tuple(labels), tuple(out))
