"""
Elementary matrices and the standard quantum left/right matrices.

The elementary builders are classical: entries are TorusElements multiplied
with omega = 1. Weyl ordering is applied once, entrywise, at the final
assembly, which amounts to reading the same exponent dictionaries as
Weyl-normal monomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from src.algebra.quantum_torus import (
    DiscreteTriangle,
    QuiverForm,
    TorusElement,
    Vertex,
    build_quiver,
    build_triangle,
    dominates,
    mul,
)
from src.algebra.scalars import LaurentScalar
from src.utils.logger import setup_logger

logger = setup_logger("fg_matrices")


@dataclass(frozen=True)
class QMatrix:
    n: int
    quiver: QuiverForm
    entries: tuple[tuple[TorusElement, ...], ...]
    weyl: bool = False

    def __getitem__(self, ij: tuple[int, int]) -> TorusElement:
        """1-based (i, j) entry."""
        i, j = ij
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise ValueError(f"index ({i},{j}) outside a {self.n}x{self.n} matrix")
        return self.entries[i - 1][j - 1]

    @property
    def tri(self) -> DiscreteTriangle:
        return self.quiver.tri

    def matmul(self, other: "QMatrix", commutative: bool = True) -> "QMatrix":
        if self.n != other.n or self.tri != other.tri:
            raise ValueError("matrix product over different tori")
        rows = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                acc = TorusElement.zero(self.quiver)
                for k in range(self.n):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a.is_zero or b.is_zero:
                        continue
                    acc = acc + (a.commutative_mul(b) if commutative else mul(a, b, self.quiver))
                row.append(acc)
            rows.append(tuple(row))
        return QMatrix(self.n, self.quiver, tuple(rows), weyl=self.weyl and not commutative)

    def weyl_ordered(self) -> "QMatrix":
        return QMatrix(self.n, self.quiver, self.entries, weyl=True)

    def reversed_indices(self) -> "QMatrix":
        """Entry (i, j) becomes entry (n+1-i, n+1-j)."""
        rows = tuple(tuple(reversed(row)) for row in reversed(self.entries))
        return QMatrix(self.n, self.quiver, rows, weyl=self.weyl)

    def rotate(self, steps: int) -> "QMatrix":
        rows = tuple(tuple(rotate_vertices(e, steps) for e in row) for row in self.entries)
        return QMatrix(self.n, self.quiver, rows, weyl=self.weyl)

    def is_lower_triangular(self) -> bool:
        return all(self.entries[i][j].is_zero for i in range(self.n) for j in range(i + 1, self.n))

    def is_upper_triangular(self) -> bool:
        return all(self.entries[i][j].is_zero for i in range(self.n) for j in range(i))


def _identity_rows(n: int, quiver: QuiverForm) -> list[list[TorusElement]]:
    return [
        [TorusElement.one(quiver) if i == j else TorusElement.zero(quiver) for j in range(n)]
        for i in range(n)
    ]


def _power(quiver: QuiverForm, v: Vertex | None, k: int) -> TorusElement:
    if v is None or k == 0:
        return TorusElement.one(quiver)
    return TorusElement.generator(quiver, v, k)


def _freeze(n: int, quiver: QuiverForm, rows) -> QMatrix:
    return QMatrix(n, quiver, tuple(tuple(r) for r in rows))


def _check_index(n: int, j: int):
    if not 1 <= j <= n - 1:
        raise ValueError(f"elementary matrix index j={j} outside 1..{n - 1}")


# ==============================================================================
# ELEMENTARY MATRICES
# ==============================================================================
def elem_edge(n: int, j: int, Z: Vertex, quiver: QuiverForm | None = None) -> QMatrix:
    """Z^(-j/n) diag(Z x j, 1 x (n-j))."""
    _check_index(n, j)
    quiver = quiver or build_quiver(build_triangle(n))
    rows = _identity_rows(n, quiver)
    for i in range(1, n + 1):
        rows[i - 1][i - 1] = _power(quiver, Z, n - j if i <= j else -j)
    return _freeze(n, quiver, rows)


def elem_left(n: int, j: int, X: Vertex | None = None, quiver: QuiverForm | None = None) -> QMatrix:
    """X^(-(j-1)/n) diag(X x (j-1), [[1,1],[0,1]], 1 ...)."""
    _check_index(n, j)
    if X is None and j != 1:
        raise ValueError(f"elem_left needs a vertex for j={j}")
    quiver = quiver or build_quiver(build_triangle(n))
    X = None if j == 1 else X
    rows = _identity_rows(n, quiver)
    for i in range(1, n + 1):
        rows[i - 1][i - 1] = _power(quiver, X, n - j + 1 if i < j else -(j - 1))
    rows[j - 1][j] = _power(quiver, X, -(j - 1))
    return _freeze(n, quiver, rows)


def elem_right(n: int, j: int, X: Vertex | None = None, quiver: QuiverForm | None = None) -> QMatrix:
    """X^((j-1)/n) diag(1 x (n-j-1), [[1,0],[1,1]], X^-1 x (j-1)), the index mirror of elem_left at X^-1."""
    _check_index(n, j)
    if X is None and j != 1:
        raise ValueError(f"elem_right needs a vertex for j={j}")
    quiver = quiver or build_quiver(build_triangle(n))
    X = None if j == 1 else X
    rows = _identity_rows(n, quiver)
    for i in range(1, n + 1):
        rows[i - 1][i - 1] = _power(quiver, X, j - 1 if i <= n - j + 1 else j - 1 - n)
    rows[n - j][n - j - 1] = _power(quiver, X, j - 1)
    return _freeze(n, quiver, rows)


def _chain(mats: list[QMatrix]) -> QMatrix:
    result = mats[0]
    for m in mats[1:]:
        result = result.matmul(m)
    return result


def edge_matrix(n: int, corner_vertex, quiver: QuiverForm) -> QMatrix:
    """prod_{j=1..n-1} E_j(Z_j) with Z_j = corner_vertex(j)."""
    return _chain([elem_edge(n, j, corner_vertex(j), quiver) for j in range(1, n)])


def middle_matrix(n: int, side: str, quiver: QuiverForm) -> QMatrix:
    """M^left or M^right: the descending product over i = n-1 .. 1."""
    blocks = []
    for i in range(n - 1, 0, -1):
        if side == "left":
            factors = [elem_left(n, 1, None, quiver)] + [
                elem_left(n, j, (j - 1, n - i, i - j + 1), quiver) for j in range(2, i + 1)
            ]
        else:
            factors = [elem_right(n, 1, None, quiver)] + [
                elem_right(n, j, (i - j + 1, n - i, j - 1), quiver) for j in range(2, i + 1)
            ]
        blocks.append(_chain(factors))
    return _chain(blocks)


@lru_cache(maxsize=None)
def _standard_matrix(n: int, side: str) -> QMatrix:
    if int(n) != n or n < 2:
        raise ValueError(f"standard matrices need an integer n >= 2, got {n!r}")
    quiver = build_quiver(build_triangle(n))
    first = edge_matrix(n, lambda j: (j, 0, n - j), quiver)
    if side == "left":
        last = edge_matrix(n, lambda j: (j, n - j, 0), quiver)
    else:
        last = edge_matrix(n, lambda j: (0, j, n - j), quiver)
    full = first.matmul(middle_matrix(n, side, quiver)).matmul(last)
    result = full.reversed_indices().weyl_ordered()
    logger.info(f"🧮 Built {side} matrix for n={n}: {sum(len(e) for row in result.entries for e in row)} monomials")
    return result


def left_matrix(n: int) -> QMatrix:
    """L^omega, lower triangular."""
    return _standard_matrix(n, "left")


def right_matrix(n: int) -> QMatrix:
    """R^omega, upper triangular."""
    return _standard_matrix(n, "right")


# ==============================================================================
# TRIANGULAR SYMMETRY
# ==============================================================================
def rotate_vertex(v: Vertex, steps: int = 1) -> Vertex:
    for _ in range(steps % 3):
        a, b, c = v
        v = (c, a, b)
    return v


@lru_cache(maxsize=None)
def _rotation_map(tri: DiscreteTriangle, steps: int) -> np.ndarray:
    perm = np.array([tri.position(rotate_vertex(v, steps)) for v in tri.vertices], dtype=np.int64)
    P = build_quiver(tri).matrix
    if not np.array_equal(P[np.ix_(perm, perm)], P):
        raise RuntimeError(f"quiver for n={tri.n} is not invariant under rotation by {steps}")
    return perm


def rotate_vertices(e: TorusElement, steps: int) -> TorusElement:
    """Relabel exponents by (a,b,c) -> (c,a,b), applied `steps` times."""
    if steps not in (0, 1, 2, 3):
        raise ValueError(f"rotation steps must be in 0..3, got {steps}")
    if steps % 3 == 0:
        return e
    return e.relabel(_rotation_map(e.tri, steps % 3))


# ==============================================================================
# DIAGONAL ENTRIES
# ==============================================================================
def diagonal_degree_formula(n: int, i: int, v: Vertex) -> int:
    a = v[0]
    if a == 0:
        return 0
    return n - a if n + 1 - i <= a else -a


def verify_diagonal_entries(n: int) -> dict:
    """
    Checks, against the constructed L^omega:
      monomial     every M_ii is one monomial
      commute      M_ii M_jj == M_jj M_ii
      dominance    deg M_ii > deg M_(i-1)(i-1) and > every monomial of M_ij, j < i
      formula      deg M_ii(a,b,c) = n-a / -a / 0
      products     degrees of the corner products equal the min formulas
    """
    from src.logic.tropical_fan import tropical_t

    M = left_matrix(n)
    tri = M.tri
    report = {"n": n, "items": {}}

    def record(name: str, failure):
        report["items"][name] = {"ok": failure is None, "counterexample": failure}
        if failure is not None:
            logger.error(f"❌ Diagonal entry check '{name}' fails for n={n}: {failure}")

    failure = None
    for i in range(1, n + 1):
        if len(M[i, i]) != 1:
            failure = {"i": i, "terms": len(M[i, i])}
            break
    record("monomial", failure)
    if failure is not None:
        report["ok"] = False
        return report

    diag = {i: next(iter(M[i, i].terms)) for i in range(1, n + 1)}

    failure = None
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if mul(M[i, i], M[j, j], M.quiver) != mul(M[j, j], M[i, i], M.quiver):
                failure = {"i": i, "j": j}
                break
        if failure:
            break
    record("commute", failure)

    failure = None
    for i in range(1, n + 1):
        if i > 1 and not dominates(diag[i], diag[i - 1]):
            failure = {"i": i, "against": i - 1}
            break
        for j in range(1, i):
            bad = [d for d in M[i, j].terms if not dominates(diag[i], d)]
            if bad:
                failure = {"i": i, "j": j}
                break
        if failure:
            break
    record("dominance", failure)

    failure = None
    for i in range(1, n + 1):
        for pos, v in enumerate(tri.vertices):
            if diag[i][pos] != diagonal_degree_formula(n, i, v):
                failure = {"i": i, "vertex": list(v), "degree": diag[i][pos]}
                break
        if failure:
            break
    record("formula", failure)

    failure = None
    for k in range(1, n):
        right_sum = np.sum([diag[i] for i in range(n + 1 - k, n + 1)], axis=0)
        left_sum = np.sum([diag[i] for i in range(k + 1, n + 1)], axis=0)
        tR, tL = tropical_t(n, k, "R"), tropical_t(n, k, "L")
        for pos, v in enumerate(tri.vertices):
            if int(right_sum[pos]) != tR[v] or int(left_sum[pos]) != tL[v]:
                failure = {"k": k, "vertex": list(v)}
                break
        if failure:
            break
    record("products", failure)

    report["ok"] = all(item["ok"] for item in report["items"].values())
    if report["ok"]:
        logger.info(f"✅ Diagonal entries verified for n={n}")
    return report


def leading_diagonal(M: QMatrix, i: int) -> tuple[tuple[int, ...], LaurentScalar]:
    """(degree, coefficient) of the single monomial M_ii."""
    entry = M[i, i]
    if len(entry) != 1:
        raise RuntimeError(f"diagonal entry ({i},{i}) has {len(entry)} monomials")
    (d, c), = entry.terms.items()
    return d, c
