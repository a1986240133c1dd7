"""Acceptance criteria, one test per criterion.

Each ``criterion_*`` function returns ``(ok, detail)``; the wrapper times it
against its budget and records a one-line verdict that the terminal summary
prints (see conftest.py).  Run directly with ``python tests/test_acceptance.py``
for the same lines without pytest.
"""

from __future__ import annotations

import json
import random
import time
from fractions import Fraction

import pytest

from heightrel.cli import run
from heightrel.demos import cm_automorphism, cm_curve, cm_points, demo_rm_surface
from heightrel.endo_algebra import (
    deg,
    deg_exponent,
    fixed_space,
    make_quadratic_field,
    make_quaternion,
    norm_form,
)
from heightrel.exact_linalg import QMatrix, determinant, rank
from heightrel.height_relations import (
    pairing_shape,
    theorem1_bound,
    trivial_bound,
)
from heightrel.neron_tate import EllipticCurve, adjoint_check, canonical_height, degree_scaling_check
from heightrel.neron_tate.heights import height_or_estimate
from heightrel.relation_finder import canonical_basis, find_relations
from heightrel.transform_forms import alpha_matrix

RESULTS: dict[int, tuple[bool, str]] = {}


def builtin_algebras():
    return {
        "I": make_quadratic_field(5, "trivial"),
        "II": make_quaternion(1, 1, "orthogonal", (0, 1, 0, 0)),
        "III": make_quaternion(-1, -1, "canonical"),
        "IV": make_quadratic_field(-1, "conjugation"),
    }


def _cli(capsys, command, doc):
    import tempfile
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(doc, fh)
    code = run([command, fh.name])
    out = capsys.readouterr().out
    return code, json.loads(out)


# -- 1 ---------------------------------------------------------------------------------

def criterion_1():
    expected = {"I": [2, 6, 12], "II": [3, 10, 21], "III": [1, 6, 15], "IV": [1, 4, 9]}
    bad = []
    for kind, A in builtin_algebras().items():
        for n in (1, 2, 3):
            got = pairing_shape(n, A).param_dim
            bound = theorem1_bound(n * A.dim, A)
            if not (got == bound == expected[kind][n - 1]):
                bad.append(f"{kind} n={n}: shape {got}, bound {bound}")
    return not bad, "; ".join(bad) or "12/12 cases: param_dim == theorem1_bound"


# -- 2 ---------------------------------------------------------------------------------

def _same_span(mats_a, mats_b) -> bool:
    rows_a = [list(M.entries) for M in mats_a]
    rows_b = [list(M.entries) for M in mats_b]
    ra = rank(QMatrix.from_rows(rows_a))
    return ra == len(rows_b) == rank(QMatrix.from_rows(rows_a + rows_b))


def criterion_2(capsys):
    problems = []
    # D = 5: every solution is [[a, b], [b, 5a]]
    code, rep = _cli(capsys, "shape", {"n": 1, "algebra": {"quadratic": {"D": 5, "involution": "trivial"}}})
    basis = [QMatrix.from_rows([[Fraction(c) for c in row] for row in G]) for G in rep["results"]["gram_basis"]]
    golden = [QMatrix.from_rows([[1, 0], [0, 5]]), QMatrix.from_rows([[0, 1], [1, 0]])]
    if code or not _same_span(basis, golden) or rep["results"]["entry_relations"] != [[5, 0, -1]]:
        problems.append("D=5 shape")
    # D = -1: [[a, 0], [0, -D a]] = [[a, 0], [0, a]]
    code, rep = _cli(capsys, "shape", {"n": 1, "algebra": {"quadratic": {"D": -1, "involution": "conjugation"}}})
    basis = [QMatrix.from_rows([[Fraction(c) for c in row] for row in G]) for G in rep["results"]["gram_basis"]]
    if code or not _same_span(basis, [QMatrix.from_rows([[1, 0], [0, 1]])]):
        problems.append("D=-1 shape")
    rng = random.Random(2)
    D = 5
    for _ in range(20):
        a, b = rng.randint(-30, 30), rng.randint(-30, 30)
        code, rep = _cli(capsys, "transform", {"algebra": {"quadratic": {"D": D, "involution": "trivial"}},
                                               "phi": [str(a), str(b)], "g": 2})
        want = [[a * a + D * b * b, 2 * a * b], [2 * a * b * D, a * a + D * b * b]]
        got = [[Fraction(c) for c in row] for row in rep["results"]["matrix"]]
        if code or got != want:
            problems.append(f"transform ({a},{b})")
    return not problems, "; ".join(problems) or "both shapes and 20/20 transform matrices exact"


# -- 3 ---------------------------------------------------------------------------------

def criterion_3():
    rng = random.Random(3)
    checked, bad = 0, []
    for kind, A in builtin_algebras().items():
        s = fixed_space(A).dim
        gs = [g for g in (1, 2, 3, 4) if _valid_g(A, g)]
        for _ in range(100):
            phi = A.element(*(Fraction(rng.randint(-20, 20), rng.randint(1, 4)) for _ in range(A.dim)))
            for g in gs:
                det = determinant(alpha_matrix(A, None, phi, g, check=False).entries)
                d = deg(A, g, phi)
                value, m = norm_form(A, phi)
                # deg^(s/g) without roots: det^g == deg^s, and det == norm^(2s/m)
                if det ** g != d ** s or det != value ** (2 * s // m):
                    bad.append(f"{kind} g={g} phi={phi}")
                checked += 1
        for n in (-3, 2, 7):
            for g in gs:
                det = determinant(alpha_matrix(A, None, A.scalar(n), g, check=False).entries)
                if det != n ** (2 * s) or det ** g != deg(A, g, A.scalar(n)) ** s:
                    bad.append(f"{kind} n={n} g={g}")
                checked += 1
    return not bad, "; ".join(bad[:5]) or f"{checked} determinant identities exact"


def _valid_g(A, g) -> bool:
    try:
        deg_exponent(A, g)
    except ValueError:
        return False
    return True


# -- 4 ---------------------------------------------------------------------------------

def criterion_4():
    algebras = list(builtin_algebras().values()) + [
        make_quadratic_field(D, kind)
        for D in (2, 3, 13) for kind in ("trivial", "conjugation")
    ] + [make_quadratic_field(D) for D in (-2, -3, -7)] + [
        make_quaternion(-1, -3), make_quaternion(2, 3), make_quaternion(2, 3, "orthogonal", (0, 1, 0, 0)),
    ]
    bad, count = [], 0
    for A in algebras:
        if A.dim < 2:
            continue
        for r in (A.dim, 2 * A.dim, 3 * A.dim):
            count += 1
            if not theorem1_bound(r, A) < trivial_bound(r):
                bad.append(f"{A.label} r={r}")
    return not bad, "; ".join(bad) or f"{count}/{count} strict inequalities"


# -- 5 ---------------------------------------------------------------------------------

def criterion_5():
    E = EllipticCurve.from_coefficients([0, 0, 1, -1, 0])
    P = E.point(0, 0)
    tol, cap = 1e-4, 10
    h1 = canonical_height(E, P, tol, cap)
    h2 = canonical_height(E, E.multiply(2, P), tol, cap)
    h3 = canonical_height(E, E.multiply(3, P), tol, cap)
    hm = canonical_height(E, E.negate(P), tol, cap)
    quad = abs(h3.value - 9 * h1.value)
    quad_budget = h3.error_bound + 9 * h1.error_bound
    # h(P + 2P) + h(P - 2P) = 2 h(P) + 2 h(2P)
    par = abs(h3.value + hm.value - 2 * h1.value - 2 * h2.value)
    par_budget = h3.error_bound + hm.error_bound + 2 * h1.error_bound + 2 * h2.error_bound
    a8 = canonical_height(E, P, tol, 8)
    a10 = canonical_height(E, P, tol, 10)
    caps_tol = abs(a8.value - a10.value) <= a8.error_bound + a10.error_bound
    # tightest tolerance, where the cap actually binds
    e8, _ = height_or_estimate(E, P, 1e-8, 8)
    e10, _ = height_or_estimate(E, P, 1e-8, 10)
    caps_tight = abs(e8.value - e10.value) <= e8.error_bound + e10.error_bound
    ok = h1.value > 0 and quad <= quad_budget and par <= par_budget and caps_tol and caps_tight
    return ok, (f"h(P)={h1.value:.7f}; |h(3P)-9h(P)|={quad:.2e} <= {quad_budget:.2e}; "
                f"parallelogram {par:.2e} <= {par_budget:.2e}; caps 8/10 agree "
                f"({abs(e8.value - e10.value):.2e} <= {e8.error_bound + e10.error_bound:.2e})")


# -- 6 ---------------------------------------------------------------------------------

def criterion_6():
    E = cm_curve()
    pts = cm_points(E)
    f = cm_automorphism(E)
    adj = adjoint_check(E, f, pts, 1e-4, 10)
    scal = degree_scaling_check(E, f, pts, 1e-4, 10)
    ok = adj.ok and scal.ok and adj.max_residual <= 1e-3 and scal.max_residual <= 1e-3
    return ok, (f"adjoint max residual {adj.max_residual:.2e} (budget {adj.budget:.2e}); "
                f"degree scaling {scal.max_residual:.2e} (budget {scal.budget:.2e}); {len(pts)} points")


# -- 7 ---------------------------------------------------------------------------------

def criterion_7():
    notes = []
    ok = True
    for D, n in ((5, 1), (5, 2), (13, 1), (13, 2)):
        res, _ = demo_rm_surface(D, n)
        d = res.details
        good = (res.ok and d["detected"] == d["predicted"] and d["estimated_span_dim"] == d["theorem1_bound"])
        ok = ok and good
        notes.append(f"D={D} n={n}: {len(d['detected'])} relations, span {d['estimated_span_dim']}"
                     f"={d['theorem1_bound']}")
        bad, _ = demo_rm_surface(D, n, corrupt=True)
        ok = ok and bad.verdict == "inconsistent"
    return ok, "; ".join(notes) + "; corrupted variants inconsistent" if ok else "; ".join(notes)


# -- 8 ---------------------------------------------------------------------------------

PLANT_NOISE = 1e-12
TRIALS = 100
SIZES = (2, 3, 4, 5, 6)


def planted_system(rng: random.Random, k: int):
    """k values, j = 1..k-1 relations with coefficients <= 50, noise 1e-12."""
    j = rng.randint(1, k - 1)
    free = [rng.uniform(1, 2) for _ in range(k - j)]
    rels, values = [], []
    for t in range(j):
        c0 = rng.randint(1, 50)
        cs = [rng.randint(-50, 50) for _ in free]
        values.append(sum(c * v for c, v in zip(cs, free)) / c0)
        m = [0] * k
        m[t] = c0
        for i, c in enumerate(cs):
            m[j + i] = -c
        rels.append(m)
    values += free
    values = [v + rng.uniform(-PLANT_NOISE, PLANT_NOISE) for v in values]
    return values, canonical_basis(rels)


def criterion_8():
    rng = random.Random(8)
    planted_fail = {k: 0 for k in SIZES}
    generic_fail = {k: 0 for k in SIZES}
    per_size = {k: 0 for k in SIZES}
    for trial in range(TRIALS):
        k = SIZES[trial % len(SIZES)]
        per_size[k] += 1
        values, rels = planted_system(rng, k)
        got = [r.coefficients for r in find_relations(values, 12, 100)]
        if got != rels:
            planted_fail[k] += 1
        generic = [rng.uniform(1, 2) for _ in range(k)]
        if find_relations(generic, 12, 100):
            generic_fail[k] += 1
    p_bad, g_bad = sum(planted_fail.values()), sum(generic_fail.values())
    breakdown = ", ".join(f"k={k}: {planted_fail[k]}/{generic_fail[k]} of {per_size[k]}" for k in SIZES)
    return p_bad == 0 and g_bad == 0, (f"planted missed {p_bad}/{TRIALS}, generic false positives "
                                       f"{g_bad}/{TRIALS} (planted/generic failures by size: {breakdown})")


# -- harness -----------------------------------------------------------------------------

BUDGETS = {1: 10, 2: 5, 3: 30, 4: 1, 5: 60, 6: 120, 7: 10, 8: 30}
TITLES = {
    1: "dimension oracle equivalence",
    2: "golden shape and transform matrices",
    3: "determinant identity",
    4: "strict sharpening over the trivial bound",
    5: "canonical height properties on y^2 + y = x^3 - x",
    6: "CM adjointness and degree scaling over Q(i)",
    7: "relation pipeline on planted real-multiplication data",
    8: "relation-finder soundness (planted and generic)",
}


def _record(number: int, fn, *args):
    start = time.perf_counter()
    ok, detail = fn(*args)
    elapsed = time.perf_counter() - start
    in_time = elapsed < BUDGETS[number]
    ok = ok and in_time
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number} ({TITLES[number]}): {detail}; {elapsed:.2f}s of {BUDGETS[number]}s"
    RESULTS[number] = (ok, line)
    return ok, line


@pytest.mark.parametrize("number", sorted(TITLES))
def test_criterion(number, capsys):
    fn = globals()[f"criterion_{number}"]
    args = (capsys,) if number == 2 else ()
    ok, line = _record(number, fn, *args)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    class _Capture:
        """Minimal stand-in for pytest's capsys."""

        def __init__(self):
            import io
            import sys
            self._sys, self._io = sys, io
            self._buf = io.StringIO()
            self._old = sys.stdout
            sys.stdout = self._buf

        def readouterr(self):
            out = self._buf.getvalue()
            self._buf.seek(0)
            self._buf.truncate()
            return type("R", (), {"out": out})()

        def restore(self):
            self._sys.stdout = self._old

    for number in sorted(TITLES):
        fn = globals()[f"criterion_{number}"]
        if number == 2:
            cap = _Capture()
            try:
                _, line = _record(number, fn, cap)
            finally:
                cap.restore()
        else:
            _, line = _record(number, fn)
        print(line)
