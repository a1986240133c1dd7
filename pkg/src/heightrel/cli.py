"""Command-line front end.

Every command reads one JSON document (``-`` for stdin), validates it
strictly against a schema (unknown keys are rejected), and writes a JSON
report whose top-level keys are, in order: ``command``, ``inputs_digest``,
``results``, ``versions``, ``timings``.  Only ``timings`` varies between runs.

Exit status: 0 success, 2 invalid input (a JSON error object naming the
offending path is printed), 1 internal consistency failure such as a
determinant mismatch or a residual outside its budget.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import platform
import re
import sys
import time
from importlib import metadata
from fractions import Fraction
from typing import Any

import jsonschema

from . import __version__
from .endo_algebra import (
    AlgebraElement,
    AlgebraError,
    InvolutiveAlgebra,
    classify_albert,
    fixed_space,
    make_quadratic_field,
    make_quaternion,
    make_rational_field,
    validate,
)
from .exact_linalg import QMatrix
from .height_relations import RankNotDivisible, RelationSet, pairing_shape, theorem1_bound, trivial_bound
from .neron_tate import (
    BaseField,
    CurveError,
    EllipticCurve,
    EndoError,
    EndoMap,
    FieldError,
    Poly2,
    validate_endo,
)
from .neron_tate.heights import (
    DEFAULT_CAP,
    DEFAULT_TOL,
    DoublingCapExceeded,
    adjoint_check,
    degree_scaling_check,
    gram_matrix,
    height_or_estimate,
)
from .relation_finder import compare_values, find_relations
from .transform_forms import (
    DeterminantMismatch,
    alpha_matrix,
    det_check,
    scalar_locus_check,
    transform_heights,
)

COMMANDS = ("bound", "shape", "transform", "height", "gram", "verify-adjoint", "relations", "demo")

# -- schemas ---------------------------------------------------------------------

RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*[+-]?(\d+(/\d+)?|\d*\.\d+|\d+\.\d*)\s*$"},
    ]
}
FIELD_LITERAL = {
    "oneOf": [RATIONAL, {"type": "array", "items": RATIONAL, "minItems": 2, "maxItems": 2}]
}
ALGEBRA = {
    "type": "object",
    "oneOf": [
        {"required": ["quadratic"]},
        {"required": ["quaternion"]},
        {"required": ["rational"]},
        {"required": ["dim", "structure_constants", "unit", "involution"]},
    ],
    "properties": {
        "quadratic": {
            "type": "object",
            "required": ["D"],
            "additionalProperties": False,
            "properties": {"D": {"type": "integer"},
                           "involution": {"enum": ["conjugation", "trivial"]}},
        },
        "quaternion": {
            "type": "object",
            "required": ["a", "b"],
            "additionalProperties": False,
            "properties": {"a": RATIONAL, "b": RATIONAL,
                           "involution": {"enum": ["canonical", "orthogonal"]},
                           "u": {"type": "array", "items": RATIONAL, "minItems": 4, "maxItems": 4}},
        },
        "rational": {"type": "object", "additionalProperties": False},
        "dim": {"type": "integer", "minimum": 1},
        "structure_constants": {"type": "array", "items": {"type": "array", "items": {
            "type": "array", "items": RATIONAL}}},
        "unit": {"type": "array", "items": RATIONAL},
        "involution": {"type": "array", "items": {"type": "array", "items": RATIONAL}},
        "label": {"type": "string"},
    },
    "additionalProperties": False,
}
FIELD = {
    "type": "object",
    "required": ["kind"],
    "additionalProperties": False,
    "properties": {"kind": {"enum": ["Q", "Qi", "imaginary_quadratic"]}, "d": {"type": "integer"}},
}
CURVE = {
    "type": "object",
    "additionalProperties": False,
    "properties": {k: FIELD_LITERAL for k in ("a1", "a2", "a3", "a4", "a6")},
}
POINT = {
    "type": "object",
    "required": ["x", "y"],
    "additionalProperties": False,
    "properties": {"x": FIELD_LITERAL, "y": FIELD_LITERAL},
}
POLY = {
    "type": "array",
    "minItems": 1,
    "items": {
        "type": "object",
        "required": ["coeff"],
        "additionalProperties": False,
        "properties": {"coeff": FIELD_LITERAL,
                       "x": {"type": "integer", "minimum": 0},
                       "y": {"type": "integer", "minimum": 0}},
    },
}
ENDO = {
    "type": "object",
    "oneOf": [{"required": ["scalar"]}, {"required": ["x_num", "x_den", "y_num", "y_den"]}],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "scalar": {"type": "integer", "not": {"const": 0}},
        "x_num": POLY, "x_den": POLY, "y_num": POLY, "y_den": POLY,
        "degree": {"type": "integer", "minimum": 1},
        "adjoint": {"type": "string", "pattern": r"^(self(\^\d+)?|endo:\d+)$"},
    },
}
CURVE_INPUT = {
    "type": "object",
    "required": ["curve", "points"],
    "additionalProperties": False,
    "properties": {
        "field": FIELD,
        "curve": CURVE,
        "points": {"type": "array", "items": POINT},
        "endos": {"type": "array", "items": ENDO},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "cap": {"type": "integer", "minimum": 1},
    },
}
PHI = {"oneOf": [{"type": "array", "items": RATIONAL, "minItems": 1}, {"type": "string", "minLength": 1}]}

SCHEMAS: dict[str, dict] = {
    "bound": {
        "type": "object",
        "required": ["r", "algebra"],
        "additionalProperties": False,
        "properties": {"r": {"type": "integer", "minimum": 0}, "algebra": ALGEBRA},
    },
    "shape": {
        "type": "object",
        "required": ["n", "algebra"],
        "additionalProperties": False,
        "properties": {"n": {"type": "integer", "minimum": 1}, "algebra": ALGEBRA},
    },
    "transform": {
        "type": "object",
        "required": ["algebra", "phi"],
        "additionalProperties": False,
        "properties": {"algebra": ALGEBRA, "phi": PHI, "g": {"type": "integer", "minimum": 1},
                       "heights": {"type": "array", "items": {"type": "number"}}},
    },
    "height": CURVE_INPUT,
    "gram": CURVE_INPUT,
    "verify-adjoint": {**CURVE_INPUT, "required": ["curve", "points", "endos"]},
    "relations": {
        "type": "object",
        "oneOf": [{"required": ["values"]}, {"required": ["gram"]}],
        "additionalProperties": False,
        "properties": {
            "values": {"type": "array", "items": {"type": "string"}, "minItems": 1},
            "gram": {"type": "object"},
            "error_bound": {"type": "number", "minimum": 0},
            "predicted": {
                "type": "object",
                "required": ["relations"],
                "additionalProperties": False,
                "properties": {
                    "labels": {"type": "array", "items": {"type": "array", "items": {"type": "integer"},
                                                          "minItems": 2, "maxItems": 2}},
                    "relations": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                },
            },
        },
    },
}


class InputError(ValueError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(message)
        self.path = path


class ConsistencyError(RuntimeError):
    pass


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def check_schema(command: str, doc: Any) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMAS[command])
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = max(errors, key=lambda e: len(e.absolute_path))
        raise InputError(err.message, _json_path(err.absolute_path))


# -- parsing -----------------------------------------------------------------------

def _rational(v) -> Fraction:
    return Fraction(v.strip()) if isinstance(v, str) else Fraction(v)


def parse_algebra(doc: dict, path: str = "$.algebra") -> InvolutiveAlgebra:
    try:
        if "quadratic" in doc:
            q = doc["quadratic"]
            return make_quadratic_field(q["D"], q.get("involution", "conjugation"))
        if "quaternion" in doc:
            q = doc["quaternion"]
            u = [_rational(c) for c in q["u"]] if "u" in q else None
            return make_quaternion(_rational(q["a"]), _rational(q["b"]), q.get("involution", "canonical"), u)
        if "rational" in doc:
            return make_rational_field()
        dim = doc["dim"]
        sc = tuple(tuple(tuple(_rational(c) for c in vec) for vec in row) for row in doc["structure_constants"])
        inv = QMatrix.from_rows([[_rational(c) for c in row] for row in doc["involution"]])
        A = InvolutiveAlgebra(dim, sc, tuple(_rational(c) for c in doc["unit"]), inv,
                              label=doc.get("label", "custom"), shape="custom", params=())
    except (AlgebraError, ValueError) as exc:
        raise InputError(str(exc), path) from exc
    problems = validate(A)
    if problems:
        raise InputError("; ".join(problems), path)
    return A


_BASIS_NAMES = {
    "quadratic": ("1", "w"),
    "quaternion": ("1", "i", "j", "k"),
    "rational": ("1",),
}
_TERM = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*([A-Za-zω]?)")


def parse_element(A: InvolutiveAlgebra, phi, path: str = "$.phi") -> AlgebraElement:
    """Coordinates list, or an expression like ``"1+w"`` / ``"2-3i+k"``."""
    if isinstance(phi, list):
        if len(phi) != A.dim:
            raise InputError(f"expected {A.dim} coordinates, got {len(phi)}", path)
        return A.element(*(_rational(c) for c in phi))
    names = _BASIS_NAMES.get(A.shape)
    if names is None:
        raise InputError("expressions need a named algebra; give coordinates instead", path)
    text = phi.replace(" ", "").replace("ω", "w")
    coords = [Fraction(0)] * A.dim
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (m.group(2) is None and not m.group(3)):
            raise InputError(f"cannot parse {phi!r} at offset {pos}", path)
        sign, num, name = m.groups()
        c = Fraction(num) if num else Fraction(1)
        if sign == "-":
            c = -c
        name = name or "1"
        if name not in names:
            raise InputError(f"unknown basis symbol {name!r} (expected one of {names})", path)
        coords[names.index(name)] += c
        pos = m.end()
    return A.element(*coords)


def parse_field(doc: dict | None) -> BaseField:
    if not doc or doc["kind"] == "Q":
        return BaseField.rationals()
    if doc["kind"] == "Qi":
        return BaseField.imaginary_quadratic(-1)
    if "d" not in doc:
        raise InputError("imaginary_quadratic needs d", "$.field")
    try:
        return BaseField.imaginary_quadratic(doc["d"])
    except FieldError as exc:
        raise InputError(str(exc), "$.field.d") from exc


def _literal(K: BaseField, v, path: str):
    try:
        if isinstance(v, list):
            return K(_rational(v[0]), _rational(v[1]))
        return K(_rational(v))
    except (FieldError, ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc), path) from exc


def _poly(K: BaseField, terms, path: str) -> Poly2:
    return Poly2(tuple((t.get("x", 0), t.get("y", 0), _literal(K, t["coeff"], f"{path}[{k}].coeff"))
                       for k, t in enumerate(terms)))


def parse_curve_input(doc: dict):
    K = parse_field(doc.get("field"))
    coeffs = [_literal(K, doc["curve"].get(name, 0), f"$.curve.{name}") for name in ("a1", "a2", "a3", "a4", "a6")]
    try:
        E = EllipticCurve(*coeffs, base=K)
    except CurveError as exc:
        raise InputError(str(exc), "$.curve") from exc
    points = []
    for k, p in enumerate(doc["points"]):
        try:
            points.append(E.point(_literal(K, p["x"], f"$.points[{k}].x"), _literal(K, p["y"], f"$.points[{k}].y")))
        except CurveError as exc:
            raise InputError(str(exc), f"$.points[{k}]") from exc
    endos = []
    for k, e in enumerate(doc.get("endos", [])):
        path = f"$.endos[{k}]"
        try:
            if "scalar" in e:
                f = EndoMap.multiplication(e["scalar"])
            else:
                f = EndoMap(e.get("name", f"endo{k}"),
                            *(_poly(K, e[key], f"{path}.{key}") for key in ("x_num", "x_den", "y_num", "y_den")),
                            degree=e.get("degree"), adjoint=e.get("adjoint", "self"))
            validate_endo(E, f, points)
        except EndoError as exc:
            raise InputError(str(exc), path) from exc
        endos.append(f)
    return E, points, endos


# -- serialization ------------------------------------------------------------------

def _q(v) -> str:
    return str(v)


def _matrix(M: QMatrix) -> list[list[str]]:
    return [[_q(c) for c in row] for row in M.to_rows()]


def _elt(x) -> list[str]:
    return x.to_json()


def _point(P) -> dict | None:
    return None if P.is_infinity else {"x": _elt(P.x), "y": _elt(P.y)}


# -- commands -------------------------------------------------------------------------

def cmd_bound(doc, opts) -> dict:
    A = parse_algebra(doc["algebra"])
    r = doc["r"]
    kind = classify_albert(A)
    try:
        t1 = theorem1_bound(r, A)
    except RankNotDivisible as exc:
        raise InputError(str(exc), "$.r") from exc
    return {"r": r, "algebra": A.label, "trivial_bound": trivial_bound(r), "theorem1_bound": t1,
            "albert": kind.kind.value, "alpha": _q(kind.alpha), "eta": _q(fixed_space(A).eta)}


def cmd_shape(doc, opts) -> dict:
    A = parse_algebra(doc["algebra"])
    shape = pairing_shape(doc["n"], A)
    bound = theorem1_bound(shape.r, A)
    if shape.param_dim != bound:
        raise ConsistencyError(f"pairing shape has {shape.param_dim} parameters, closed form gives {bound}")
    return {
        "n": doc["n"], "r": shape.r, "algebra": A.label, "albert": classify_albert(A).kind.value,
        "param_dim": shape.param_dim, "theorem1_bound": bound, "trivial_bound": trivial_bound(shape.r),
        "generic": shape.generic_symbolic(),
        "labels": [list(ij) for ij in shape.labels],
        "entry_relations": [list(rel) for rel in shape.entry_relations],
        "gram_basis": [_matrix(G) for G in shape.gram_basis],
    }


def _default_g(A: InvolutiveAlgebra) -> int:
    m = A.dim if A.is_commutative() else 2
    g = 1
    while (2 * g) % m:
        g += 1
    return g


def cmd_transform(doc, opts) -> dict:
    A = parse_algebra(doc["algebra"])
    phi = parse_element(A, doc["phi"])
    g = doc.get("g", _default_g(A))
    try:
        tm = alpha_matrix(A, None, phi, g, check=False)
        chk = det_check(tm, A, g)
    except AlgebraError as exc:
        raise InputError(str(exc), "$.g") from exc
    if not chk.ok:
        raise ConsistencyError(str(DeterminantMismatch(chk.det, chk.expected)))
    locus = scalar_locus_check(A, None, phi, g)
    out = {
        "algebra": A.label, "phi": [_q(c) for c in phi.coords], "g": g, "s": tm.s,
        "matrix": _matrix(tm.entries),
        "det": _q(chk.det), "expected_det": _q(chk.expected), "det_ok": chk.ok,
        "scalar_locus": {"is_scalar": locus.is_scalar,
                         "factor": None if locus.factor is None else _q(locus.factor)},
    }
    if "heights" in doc:
        try:
            out["transformed_heights"] = transform_heights(tm, doc["heights"])
        except ValueError as exc:
            raise InputError(str(exc), "$.heights") from exc
    return out


def _tol_cap(doc, opts):
    tol = opts.tol if opts.tol is not None else doc.get("tol", DEFAULT_TOL)
    cap = opts.cap if opts.cap is not None else doc.get("cap", DEFAULT_CAP)
    return tol, cap


def cmd_height(doc, opts) -> dict:
    E, points, _ = parse_curve_input(doc)
    tol, cap = _tol_cap(doc, opts)
    rows = []
    for P in points:
        try:
            h, converged = height_or_estimate(E, P, tol, cap)
        except ValueError as exc:
            raise InputError(str(exc), "$.tol") from exc
        rows.append({"point": _point(P), "value": h.value, "error_bound": h.error_bound,
                     "doublings": h.doublings, "converged": converged})
    return {"field": E.base.name, "tol": tol, "cap": cap, "heights": rows}


def cmd_gram(doc, opts) -> dict:
    E, points, _ = parse_curve_input(doc)
    tol, cap = _tol_cap(doc, opts)
    try:
        gm = gram_matrix(E, points, tol, cap)
    except DoublingCapExceeded as exc:
        raise InputError(str(exc), "$.tol") from exc
    except ValueError as exc:
        raise InputError(str(exc), "$.tol") from exc
    r = len(points)
    return {"field": E.base.name, "tol": tol, "cap": cap,
            "points": [_point(P) for P in points],
            "matrix": [list(row) for row in gm.matrix],
            "labels": [[i, j] for i in range(r) for j in range(i, r)],
            "values": gm.upper_values(), "error_bound": gm.error_bound}


def cmd_verify_adjoint(doc, opts) -> dict:
    E, points, endos = parse_curve_input(doc)
    tol, cap = _tol_cap(doc, opts)
    rows = []
    ok = True
    for k, f in enumerate(endos):
        try:
            adj = adjoint_check(E, f, points, tol, cap, endos)
            scal = degree_scaling_check(E, f, points, tol, cap) if f.degree is not None else None
        except DoublingCapExceeded as exc:
            raise InputError(str(exc), "$.tol") from exc
        except EndoError as exc:
            raise InputError(str(exc), f"$.endos[{k}]") from exc
        ok = ok and adj.ok and (scal is None or scal.ok)
        rows.append({
            "endo": f.name,
            "adjoint": {"max_residual": adj.max_residual, "budget": adj.budget, "ok": adj.ok},
            "degree_scaling": None if scal is None else
            {"max_residual": scal.max_residual, "budget": scal.budget, "ok": scal.ok},
        })
    result = {"field": E.base.name, "tol": tol, "cap": cap, "checks": rows, "ok": ok}
    if not ok:
        raise ConsistencyError("residual outside its error budget", result)
    return result


def cmd_relations(doc, opts) -> dict:
    if "values" in doc:
        try:
            values = [float(Fraction(v.strip())) for v in doc["values"]]
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(str(exc), "$.values") from exc
        error_bound = doc.get("error_bound", 0.0)
        labels = None
    else:
        g = doc["gram"]
        res = g.get("results", g)
        if not isinstance(res.get("values"), list):
            raise InputError("gram report has no values list", "$.gram")
        values = [float(v) for v in res["values"]]
        error_bound = doc.get("error_bound", res.get("error_bound", 0.0))
        labels = res.get("labels")
    p, hb = opts.precision_digits, opts.height_bound
    try:
        detected = find_relations(values, p, hb)
    except ValueError as exc:
        raise InputError(str(exc), "$.values") from exc
    out = {"values": values, "precision_digits": p, "height_bound": hb,
           "detected": [{"coefficients": list(r.coefficients), "residual": r.residual} for r in detected],
           "estimated_span_dim": len(values) - len(detected)}
    if "predicted" in doc:
        pred = doc["predicted"]
        lab = pred.get("labels", labels) or [[k, k] for k in range(len(values))]
        try:
            rs = RelationSet(tuple(tuple(ij) for ij in lab), tuple(tuple(r) for r in pred["relations"]))
            rep = compare_values(values, rs, error_bound, p, hb)
        except ValueError as exc:
            raise InputError(str(exc), "$.predicted") from exc
        out["verdict"] = rep.verdict.value
        out["notes"] = list(rep.notes)
    return out


def cmd_demo(doc, opts) -> dict:
    from .demos import demo_cm_curve, demo_rm_surface
    if opts.which == "rm":
        try:
            res, _ = demo_rm_surface(opts.D, opts.n, opts.corrupt)
        except (AlgebraError, ValueError) as exc:
            raise InputError(str(exc), "$.D") from exc
    else:
        tol, cap = _tol_cap({}, opts)
        try:
            res = demo_cm_curve(tol, cap)
        except ValueError as exc:
            raise InputError(str(exc), "$.tol") from exc
    out = {"demo": opts.which, "ok": res.ok, "verdict": res.verdict, **res.details}
    if not res.ok:
        raise ConsistencyError(f"demo verdict {res.verdict}", out)
    return out


HANDLERS = {
    "bound": cmd_bound, "shape": cmd_shape, "transform": cmd_transform, "height": cmd_height,
    "gram": cmd_gram, "verify-adjoint": cmd_verify_adjoint, "relations": cmd_relations, "demo": cmd_demo,
}


# -- driver ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heightrel", description="Height-pairing relations from endomorphism algebras.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS[:-1]:
        sp = sub.add_parser(name)
        sp.add_argument("input", help="JSON input file, or - for stdin")
        sp.add_argument("-o", "--output")
        if name in ("height", "gram", "verify-adjoint"):
            sp.add_argument("--tol", type=float)
            sp.add_argument("--cap", type=int)
        if name == "relations":
            sp.add_argument("--precision-digits", type=int, default=12)
            sp.add_argument("--height-bound", type=int, default=100)
    dp = sub.add_parser("demo")
    dp.add_argument("which", choices=["rm", "cm"])
    dp.add_argument("-o", "--output")
    dp.add_argument("--D", type=int, default=5)
    dp.add_argument("--n", type=int, default=1)
    dp.add_argument("--corrupt", action="store_true")
    dp.add_argument("--tol", type=float)
    dp.add_argument("--cap", type=int)
    return ap


def _digest(command: str, doc: Any, opts: argparse.Namespace) -> str:
    flags = {k: v for k, v in sorted(vars(opts).items()) if k not in ("input", "output", "command")}
    blob = json.dumps({"command": command, "input": doc, "flags": flags}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _load(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read input: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from exc


def make_report(command: str, digest: str, results: dict, elapsed: float) -> dict:
    return {
        "command": command,
        "inputs_digest": digest,
        "results": results,
        "versions": {"heightrel": __version__, "python": platform.python_version(),
                     "jsonschema": metadata.version("jsonschema")},
        "timings": {"total_seconds": elapsed},
    }


def _emit(obj: dict, output: str | None) -> None:
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        opts = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    command = opts.command
    start = time.perf_counter()
    try:
        doc = None
        if command != "demo":
            doc = _load(opts.input)
            check_schema(command, doc)
        results = HANDLERS[command](doc, opts)
    except InputError as exc:
        _emit({"error": "invalid_input", "command": command, "path": exc.path, "message": str(exc)}, None)
        return 2
    except ConsistencyError as exc:
        payload = exc.args[1] if len(exc.args) > 1 else None
        body = {"error": "consistency_failure", "command": command, "message": str(exc.args[0])}
        if payload is not None:
            body["results"] = payload
        _emit(body, None)
        return 1
    report = make_report(command, _digest(command, doc, opts), results, time.perf_counter() - start)
    _emit(report, getattr(opts, "output", None))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
