"""JSON documents for scalars, torus elements, matrices, trace reports and gamma polynomials."""

from __future__ import annotations

import dataclasses
import json
from typing import Any

import numpy as np
import sympy as sp

from config import settings
from src.algebra.fg_matrices import QMatrix
from src.algebra.quantum_torus import TensorElement, TorusElement, build_triangle
from src.algebra.scalars import LaurentScalar
from src.logic.annulus_trace import TraceReport
from src.logic.braid_reduction import BraidWord, GammaPolynomial
from src.logic.tropical_fan import TriangleFunction


# ==============================================================================
# SCALARS
# ==============================================================================
def scalar_to_json(s: LaurentScalar) -> dict:
    # coefficients as strings so large integers survive any JSON reader
    return {"unit": "w_half", "terms": [[e, str(c)] for e, c in s.terms]}


def scalar_from_json(doc: Any) -> LaurentScalar:
    if not isinstance(doc, dict) or doc.get("unit") != "w_half" or not isinstance(doc.get("terms"), list):
        raise ValueError(f"not a LaurentScalar document: {doc!r}")
    terms = {}
    for item in doc["terms"]:
        try:
            e, c = item
            terms[int(e)] = terms.get(int(e), 0) + int(c)
        except (TypeError, ValueError):
            raise ValueError(f"malformed scalar term {item!r}") from None
    return LaurentScalar(terms)


def rational_to_json(x) -> int | str:
    x = sp.Rational(x)
    return int(x) if x.is_integer else str(x)


# ==============================================================================
# TORUS / MATRICES
# ==============================================================================
def exponent_map(tri, d) -> dict[str, int]:
    """Sparse vertex-keyed exponents, nonzero entries only."""
    return {f"{a},{b},{c}": int(x) for (a, b, c), x in sorted(zip(tri.vertices, d)) if x}


def torus_to_json(e: TorusElement) -> dict:
    return {
        "triangle_n": e.tri.n,
        "terms": [{"scalar": scalar_to_json(c), "exp": exponent_map(e.tri, d)} for d, c in sorted(e.terms.items())],
    }


def tensor_to_json(t: TensorElement) -> dict:
    tri = build_triangle(t.n)
    return {
        "triangle_n": t.n,
        "terms": [
            {"scalar": scalar_to_json(c), "left": exponent_map(tri, dl), "right": exponent_map(tri, dr)}
            for (dl, dr), c in sorted(t.terms.items())
        ],
    }


def matrix_to_json(M: QMatrix) -> dict:
    return {
        "triangle_n": M.n,
        "weyl": M.weyl,
        "entries": [[torus_to_json(M[i, j]) for j in range(1, M.n + 1)] for i in range(1, M.n + 1)],
    }


def trace_report_to_json(r: TraceReport) -> dict:
    return {
        "element": tensor_to_json(r.element),
        "highest": None if r.highest is None else {"left": list(r.highest[0]), "right": list(r.highest[1])},
        "coefficient": scalar_to_json(r.coefficient),
        "extras": to_jsonable(r.extras),
    }


# ==============================================================================
# TROPICAL / BRAIDS
# ==============================================================================
def triangle_function_to_json(f: TriangleFunction) -> dict:
    return {"n": f.n, "values": {f"{a},{b},{c}": rational_to_json(x) for (a, b, c), x in f.values.items()}}


def triangle_function_from_json(doc: Any) -> TriangleFunction:
    if not isinstance(doc, dict) or "n" not in doc or not isinstance(doc.get("values"), dict):
        raise ValueError("triangle function documents need 'n' and a 'values' object")
    n = int(doc["n"])
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    values = {}
    for key, raw in doc["values"].items():
        try:
            v = tuple(int(x) for x in key.split(","))
            value = sp.Rational(str(raw))
        except (TypeError, ValueError, sp.SympifyError):
            raise ValueError(f"malformed triangle value {key!r}: {raw!r}") from None
        if len(v) != 3:
            raise ValueError(f"vertex key {key!r} needs three coordinates")
        if sum(v) != n or min(v) < 0:
            raise ValueError(f"{v} is not a lattice point of the n={n} triangle")
        if max(v) == n:
            if value != 0:
                raise ValueError(f"corner {v} must carry 0, got {value}")
            continue
        values[v] = value
    return TriangleFunction(n, values)


def gamma_to_json(p: GammaPolynomial) -> dict:
    return {
        "monomials": [
            {"gammas": list(key), "coeff": scalar_to_json(c)} for key, c in sorted(p.terms.items())
        ]
    }


def braid_to_json(b: BraidWord) -> dict:
    return {"strands": b.strands, "word": [i * s for i, s in b.word]}


# ==============================================================================
# GENERIC
# ==============================================================================
def to_jsonable(obj: Any) -> Any:
    """Recursively convert report payloads into plain JSON values."""
    if isinstance(obj, LaurentScalar):
        return scalar_to_json(obj)
    if isinstance(obj, GammaPolynomial):
        return gamma_to_json(obj)
    if isinstance(obj, TensorElement):
        return tensor_to_json(obj)
    if isinstance(obj, TorusElement):
        return torus_to_json(obj)
    if isinstance(obj, QMatrix):
        return matrix_to_json(obj)
    if isinstance(obj, TraceReport):
        return trace_report_to_json(obj)
    if isinstance(obj, TriangleFunction):
        return triangle_function_to_json(obj)
    if isinstance(obj, BraidWord):
        return braid_to_json(obj)
    if isinstance(obj, sp.MatrixBase):
        return [[rational_to_json(x) for x in row] for row in obj.tolist()]
    if isinstance(obj, sp.Basic) and obj.is_Rational:
        return rational_to_json(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": round(float(obj.real), 12), "im": round(float(obj.imag), 12)}
    if isinstance(obj, np.floating):
        return float(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    return obj


def envelope(command: str, n: int, result: Any) -> dict:
    return {"schema": settings.JSON_SCHEMA_VERSION, "command": command, "n": n, "result": to_jsonable(result)}


def dumps(doc: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)
