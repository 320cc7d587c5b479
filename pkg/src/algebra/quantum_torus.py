"""
Quantum torus of a decorated triangle.

Vertices of the discrete triangle are triples (a,b,c) with a+b+c = n, corners
removed. A monomial is keyed by an integer exponent vector d over those
vertices (d_v meaning X_v^(d_v/n)) and always stored in Weyl-normal form, so

    TorusElement({d: c})  ==  sum c * [X^d]

with [X^d][X^e] = omega^(1/2 <d,e>) [X^(d+e)] and <d,e> = d^T P e.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from src.algebra.scalars import LaurentScalar

Vertex = tuple[int, int, int]
Exponents = tuple[int, ...]

# v - u for an arrow u -> v
ARROW_STEPS: tuple[Vertex, ...] = ((0, 1, -1), (-1, 0, 1), (1, -1, 0))


@dataclass(frozen=True)
class DiscreteTriangle:
    n: int
    vertices: tuple[Vertex, ...] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def index(self) -> dict[Vertex, int]:
        return _vertex_index(self)

    def position(self, v: Vertex) -> int:
        try:
            return self.index[tuple(v)]
        except KeyError:
            raise ValueError(f"{v} is not a vertex of the n={self.n} discrete triangle") from None

    def is_interior(self, v: Vertex) -> bool:
        return all(x > 0 for x in v)

    def interior(self) -> list[Vertex]:
        return [v for v in self.vertices if self.is_interior(v)]

    def unit(self, v: Vertex, power: int = 1) -> Exponents:
        d = [0] * self.size
        d[self.position(v)] = power
        return tuple(d)

    def zero(self) -> Exponents:
        return (0,) * self.size


@lru_cache(maxsize=None)
def _vertex_index(tri: DiscreteTriangle) -> dict[Vertex, int]:
    return {v: i for i, v in enumerate(tri.vertices)}


@lru_cache(maxsize=None)
def build_triangle(n: int) -> DiscreteTriangle:
    """All non-corner lattice triples, lexicographic by (a,b,c)."""
    if int(n) != n or n < 2:
        raise ValueError(f"discrete triangle needs an integer n >= 2, got {n!r}")
    corners = {(n, 0, 0), (0, n, 0), (0, 0, n)}
    verts = tuple(
        (a, b, n - a - b)
        for a in range(n + 1)
        for b in range(n + 1 - a)
        if (a, b, n - a - b) not in corners
    )
    expected = (n + 1) * (n + 2) // 2 - 3
    if len(verts) != expected:
        raise RuntimeError(f"discrete triangle for n={n} has {len(verts)} vertices, expected {expected}")
    return DiscreteTriangle(n=n, vertices=verts)


@dataclass(frozen=True)
class QuiverForm:
    tri: DiscreteTriangle
    matrix: np.ndarray = field(repr=False, compare=False)

    def __call__(self, u: Vertex, v: Vertex) -> int:
        return int(self.matrix[self.tri.position(u), self.tri.position(v)])

    def pairing(self, d: Exponents, e: Exponents) -> int:
        return int(np.asarray(d, dtype=np.int64) @ self.matrix @ np.asarray(e, dtype=np.int64))


def _arrow_weight(u: Vertex, v: Vertex) -> int:
    """Weight of the arrow u -> v, or 0 when there is none."""
    step = tuple(b - a for a, b in zip(u, v))
    if step not in ARROW_STEPS:
        return 0
    same_side = any(a == 0 and b == 0 for a, b in zip(u, v))
    return 1 if same_side else 2


@lru_cache(maxsize=None)
def build_quiver(tri: DiscreteTriangle) -> QuiverForm:
    """
    Antisymmetric weight form: +1 along the boundary directions, +2 between
    vertices that do not share a side (interior arrows and the pairs cutting
    a removed corner).
    """
    size = tri.size
    P = np.zeros((size, size), dtype=np.int64)
    for i, u in enumerate(tri.vertices):
        for j, v in enumerate(tri.vertices):
            w = _arrow_weight(u, v)
            if w:
                P[i, j] = w
                P[j, i] = -w
    if not np.array_equal(P, -P.T):
        raise RuntimeError(f"quiver form for n={tri.n} is not antisymmetric")
    P.setflags(write=False)
    return QuiverForm(tri=tri, matrix=P)


def weyl_exponent(d: Exponents, quiver: QuiverForm) -> int:
    """-sum_{i<j} d_i d_j P_ij, the w_half exponent of [X^d] against the ordered product."""
    vec = np.asarray(d, dtype=np.int64)
    upper = np.triu(quiver.matrix, k=1)
    s = vec @ upper @ vec
    if int(s) != s:
        raise RuntimeError(f"non-integral Weyl exponent {s} for {d}")
    return -int(s)


# ==============================================================================
# MONOMIALS / ELEMENTS
# ==============================================================================
@dataclass(frozen=True)
class TorusMonomial:
    """scalar * X_1^(d_1/n) X_2^(d_2/n) ... in the fixed vertex order."""

    scalar: LaurentScalar
    exponents: Exponents

    def __post_init__(self):
        if not self.scalar.is_monomial:
            raise ValueError(f"TorusMonomial scalar must have exactly one term, got {self.scalar!r}")


def weyl_order(d: Exponents, quiver: QuiverForm) -> TorusMonomial:
    """[X^d] written as a scalar times the ordered product."""
    if len(d) != quiver.tri.size:
        raise ValueError(f"exponent vector of length {len(d)} for a torus with {quiver.tri.size} generators")
    return TorusMonomial(LaurentScalar.monomial(weyl_exponent(d, quiver)), tuple(int(x) for x in d))


def degree(m: TorusMonomial) -> Exponents:
    return m.exponents


def dominates(d: Exponents, e: Exponents) -> bool:
    """d > e in the partial order on degrees."""
    return d != e and all(x >= y for x, y in zip(d, e))


def _max_degree(keys: Iterable[Exponents]) -> Exponents:
    return tuple(int(x) for x in np.max(np.asarray(list(keys), dtype=np.int64), axis=0))


def _accumulate(acc: dict, key, exponent: int, coeff: LaurentScalar):
    """acc[key] += w_half^exponent * coeff, kept as raw {exp: int} dicts."""
    bucket = acc.setdefault(key, {})
    for e, c in coeff.terms:
        bucket[e + exponent] = bucket.get(e + exponent, 0) + c


def _finish(acc: dict) -> dict:
    out = {}
    for key, raw in acc.items():
        s = LaurentScalar(raw)
        if s:
            out[key] = s
    return out


class TorusElement:
    """Finite sum of Weyl-ordered monomials over one triangle's torus."""

    __slots__ = ("quiver", "terms")

    def __init__(self, quiver: QuiverForm, terms: Mapping[Exponents, LaurentScalar] | None = None):
        self.quiver = quiver
        clean = {}
        for d, c in (terms or {}).items():
            c = LaurentScalar.coerce(c)
            if c:
                if len(d) != quiver.tri.size:
                    raise ValueError(f"exponent vector of length {len(d)} for n={quiver.tri.n}")
                clean[tuple(int(x) for x in d)] = c
        self.terms: dict[Exponents, LaurentScalar] = clean

    # ---- constructors ----
    @classmethod
    def one(cls, quiver: QuiverForm) -> "TorusElement":
        return cls(quiver, {quiver.tri.zero(): LaurentScalar.one()})

    @classmethod
    def zero(cls, quiver: QuiverForm) -> "TorusElement":
        return cls(quiver)

    @classmethod
    def generator(cls, quiver: QuiverForm, v: Vertex, power: int = 1) -> "TorusElement":
        """X_v^(power/n)."""
        return cls(quiver, {quiver.tri.unit(v, power): LaurentScalar.one()})

    @classmethod
    def from_ordered(cls, quiver: QuiverForm, m: TorusMonomial) -> "TorusElement":
        """Convert scalar * ordered product into Weyl-normal form."""
        return cls(quiver, {m.exponents: m.scalar.shift(-weyl_exponent(m.exponents, quiver))})

    # ---- inspection ----
    @property
    def tri(self) -> DiscreteTriangle:
        return self.quiver.tri

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def _check(self, other: "TorusElement"):
        if not isinstance(other, TorusElement):
            raise TypeError(f"expected TorusElement, got {type(other).__name__}")
        if self.quiver.tri != other.quiver.tri:
            raise ValueError(f"torus mismatch: n={self.tri.n} vs n={other.tri.n}")

    # ---- arithmetic ----
    def __add__(self, other: "TorusElement") -> "TorusElement":
        self._check(other)
        acc = dict(self.terms)
        for d, c in other.terms.items():
            acc[d] = acc[d] + c if d in acc else c
        return TorusElement(self.quiver, acc)

    def __neg__(self) -> "TorusElement":
        return TorusElement(self.quiver, {d: -c for d, c in self.terms.items()})

    def __sub__(self, other: "TorusElement") -> "TorusElement":
        return self + (-other)

    def scale(self, s: LaurentScalar) -> "TorusElement":
        return TorusElement(self.quiver, {d: c * s for d, c in self.terms.items()})

    def __mul__(self, other) -> "TorusElement":
        if isinstance(other, (LaurentScalar, int)):
            return self.scale(LaurentScalar.coerce(other))
        return mul(self, other, self.quiver)

    def commutative_mul(self, other: "TorusElement") -> "TorusElement":
        """Product with omega = 1 (exponents add, no twist)."""
        self._check(other)
        acc: dict = {}
        for d, c in self.terms.items():
            for e, c2 in other.terms.items():
                key = tuple(x + y for x, y in zip(d, e))
                _accumulate(acc, key, 0, c * c2)
        return TorusElement(self.quiver, _finish(acc))

    def relabel(self, perm: np.ndarray) -> "TorusElement":
        """New element with exponent entry i moved to position perm[i]."""
        out = {}
        for d, c in self.terms.items():
            new = [0] * len(d)
            for i, x in enumerate(d):
                new[perm[i]] = x
            out[tuple(new)] = c
        return TorusElement(self.quiver, out)

    # ---- degrees ----
    def highest_degree(self) -> TorusMonomial | None:
        """The strictly dominant monomial, or None when there is none."""
        if not self.terms:
            return None
        top = _max_degree(self.terms)
        if top not in self.terms:
            return None
        coeff = self.terms[top]
        if not coeff.is_monomial:
            return None
        return TorusMonomial(coeff.shift(weyl_exponent(top, self.quiver)), top)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TorusElement):
            return NotImplemented
        return self.tri == other.tri and self.terms == other.terms

    def __repr__(self) -> str:
        return f"TorusElement(n={self.tri.n}, {len(self.terms)} terms)"


def mul(a: TorusElement, b: TorusElement, P: QuiverForm) -> TorusElement:
    """Product in the quantum torus, returned in Weyl-normal form."""
    a._check(b)
    if a.quiver.tri != P.tri:
        raise ValueError(f"quiver for n={P.tri.n} applied to a torus over n={a.tri.n}")
    if a.is_zero or b.is_zero:
        return TorusElement.zero(P)
    keys_a = list(a.terms)
    keys_b = list(b.terms)
    DA = np.asarray(keys_a, dtype=np.int64)
    DB = np.asarray(keys_b, dtype=np.int64)
    twists = DA @ P.matrix @ DB.T
    sums = DA[:, None, :] + DB[None, :, :]
    acc: dict = {}
    for i, d in enumerate(keys_a):
        ca = a.terms[d]
        for j, e in enumerate(keys_b):
            key = tuple(int(x) for x in sums[i, j])
            _accumulate(acc, key, int(twists[i, j]), ca * b.terms[e])
    return TorusElement(P, _finish(acc))


def product(factors: Iterable[TorusElement], quiver: QuiverForm) -> TorusElement:
    result = TorusElement.one(quiver)
    for f in factors:
        result = mul(result, f, quiver)
    return result


# ==============================================================================
# TENSOR PRODUCT OF TWO TRIANGLES
# ==============================================================================
class TensorElement:
    """Sum of c * [X^dL] (x) [X^dR] over the left and right triangles."""

    __slots__ = ("left", "right", "terms")

    def __init__(
        self,
        left: QuiverForm,
        right: QuiverForm,
        terms: Mapping[tuple[Exponents, Exponents], LaurentScalar] | None = None,
    ):
        if left.tri.n != right.tri.n:
            raise ValueError(f"tensor factors disagree on n: {left.tri.n} vs {right.tri.n}")
        self.left, self.right = left, right
        self.terms: dict[tuple[Exponents, Exponents], LaurentScalar] = {
            (tuple(dl), tuple(dr)): LaurentScalar.coerce(c) for (dl, dr), c in (terms or {}).items() if c
        }

    @classmethod
    def one(cls, left: QuiverForm, right: QuiverForm) -> "TensorElement":
        return cls(left, right, {(left.tri.zero(), right.tri.zero()): LaurentScalar.one()})

    @classmethod
    def pure(cls, a: TorusElement, b: TorusElement) -> "TensorElement":
        """a (x) b."""
        terms = {}
        for dl, cl in a.terms.items():
            for dr, cr in b.terms.items():
                terms[(dl, dr)] = cl * cr
        return cls(a.quiver, b.quiver, terms)

    @property
    def n(self) -> int:
        return self.left.tri.n

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def _check(self, other: "TensorElement"):
        if not isinstance(other, TensorElement):
            raise TypeError(f"expected TensorElement, got {type(other).__name__}")
        if self.left.tri != other.left.tri or self.right.tri != other.right.tri:
            raise ValueError("tensor element context mismatch")

    def __add__(self, other: "TensorElement") -> "TensorElement":
        self._check(other)
        acc = dict(self.terms)
        for k, c in other.terms.items():
            acc[k] = acc[k] + c if k in acc else c
        return TensorElement(self.left, self.right, acc)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + other.scale(LaurentScalar.monomial(0, -1))

    def scale(self, s: LaurentScalar) -> "TensorElement":
        return TensorElement(self.left, self.right, {k: c * s for k, c in self.terms.items()})

    def __mul__(self, other) -> "TensorElement":
        if isinstance(other, (LaurentScalar, int)):
            return self.scale(LaurentScalar.coerce(other))
        return tensor_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.left.tri == other.left.tri and self.right.tri == other.right.tri and self.terms == other.terms

    def __repr__(self) -> str:
        return f"TensorElement(n={self.n}, {len(self.terms)} terms)"

    def unit_ratio(self, other: "TensorElement") -> LaurentScalar | None:
        """The unit u with self == u * other, if there is one."""
        self._check(other)
        if self.is_zero or set(self.terms) != set(other.terms):
            return None
        key = next(iter(self.terms))
        u = self.terms[key].unit_ratio(other.terms[key])
        if u is None:
            return None
        return u if all(self.terms[k] == u * other.terms[k] for k in self.terms) else None

    def highest_degree(self) -> tuple[Exponents, Exponents, LaurentScalar] | None:
        """
        The pair (dL, dR) with dL > every other left degree and dR > every
        other right degree, with its collected coefficient.
        """
        if not self.terms:
            return None
        top_l = _max_degree(k[0] for k in self.terms)
        top_r = _max_degree(k[1] for k in self.terms)
        if (top_l, top_r) not in self.terms:
            return None
        for dl, dr in self.terms:
            if (dl, dr) != (top_l, top_r) and (dl == top_l or dr == top_r):
                return None
        return top_l, top_r, self.terms[(top_l, top_r)]


def tensor_mul(a: TensorElement, b: TensorElement) -> TensorElement:
    """(a (x) b)(a' (x) b') = aa' (x) bb', each factor in Weyl-normal form."""
    a._check(b)
    if a.is_zero or b.is_zero:
        return TensorElement(a.left, a.right)
    keys_a = list(a.terms)
    keys_b = list(b.terms)
    AL = np.asarray([k[0] for k in keys_a], dtype=np.int64)
    AR = np.asarray([k[1] for k in keys_a], dtype=np.int64)
    BL = np.asarray([k[0] for k in keys_b], dtype=np.int64)
    BR = np.asarray([k[1] for k in keys_b], dtype=np.int64)
    twists = AL @ a.left.matrix @ BL.T + AR @ a.right.matrix @ BR.T
    acc: dict = {}
    for i, ka in enumerate(keys_a):
        ca = a.terms[ka]
        for j, kb in enumerate(keys_b):
            key = (
                tuple(int(x) for x in AL[i] + BL[j]),
                tuple(int(x) for x in AR[i] + BR[j]),
            )
            _accumulate(acc, key, int(twists[i, j]), ca * b.terms[kb])
    return TensorElement(a.left, a.right, _finish(acc))
