"""
Tropical coordinate functions, rhombus numbers and the balanced Knutson-Tao
fan of the triangle and of the two-triangle annulus.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import sympy as sp

from src.algebra.quantum_torus import Vertex, build_triangle
from src.utils.logger import setup_logger

logger = setup_logger("tropical_fan")

# product of grid sizes above which hilbert_basis drops to integer values
GRID_CAP = 3_000_000


@dataclass(frozen=True)
class TriangleFunction:
    """Exact rational values on the non-corner vertices; corners read as 0."""

    n: int
    values: Mapping[Vertex, sp.Rational] = field(hash=False)

    def __post_init__(self):
        tri = build_triangle(self.n)
        clean = {}
        for v in tri.vertices:
            clean[v] = sp.Rational(self.values.get(v, 0))
        extra = set(self.values) - set(tri.vertices)
        if extra:
            raise ValueError(f"values given outside the n={self.n} triangle: {sorted(extra)}")
        object.__setattr__(self, "values", clean)

    def __getitem__(self, v: Vertex) -> sp.Rational:
        v = tuple(v)
        if sum(v) != self.n or min(v) < 0:
            raise ValueError(f"{v} is not a lattice point of the n={self.n} triangle")
        return self.values.get(v, sp.Integer(0))

    def __add__(self, other: "TriangleFunction") -> "TriangleFunction":
        if other.n != self.n:
            raise ValueError(f"cannot add functions for n={self.n} and n={other.n}")
        return TriangleFunction(self.n, {v: self.values[v] + other.values[v] for v in self.values})

    def scaled(self, c) -> "TriangleFunction":
        return TriangleFunction(self.n, {v: x * c for v, x in self.values.items()})

    def key(self) -> tuple:
        return tuple(self.values[v] for v in build_triangle(self.n).vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TriangleFunction):
            return NotImplemented
        return self.n == other.n and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.n, self.key()))

    def level_values(self) -> list[sp.Rational] | None:
        """[f(1), ..., f(n-1)] when f depends on a only, else None."""
        out = []
        for a in range(1, self.n):
            level = {self.values[v] for v in self.values if v[0] == a}
            if len(level) != 1:
                return None
            out.append(level.pop())
        return out


@dataclass(frozen=True)
class RhombusNumbers:
    top: dict[tuple[int, int], sp.Rational]
    bottom_left: dict[tuple[int, int], sp.Rational]
    bottom_right: dict[tuple[int, int], sp.Rational]

    def all_values(self) -> list[sp.Rational]:
        return [*self.top.values(), *self.bottom_left.values(), *self.bottom_right.values()]


@dataclass(frozen=True)
class AnnulusFanPoint:
    left: TriangleFunction
    right: TriangleFunction
    multiplicities: tuple[int, ...] = ()


# ==============================================================================
# TROPICAL COORDINATES
# ==============================================================================
def tropical_value(n: int, k: int, side: str, a: int) -> int:
    """t^L_k(a) = min(ka, (n-k)(n-a)); t^R_k(a) = t^L_k(n-a)."""
    x = a if side == "L" else n - a
    return min(k * x, n * (n - k) - (n - k) * x)


def tropical_t(n: int, k: int, side: str) -> TriangleFunction:
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} outside 1..{n - 1}")
    if side not in ("L", "R"):
        raise ValueError(f"side must be 'L' or 'R', got {side!r}")
    tri = build_triangle(n)
    return TriangleFunction(n, {v: tropical_value(n, k, side, v[0]) for v in tri.vertices})


def level_function(n: int, values) -> TriangleFunction:
    """f(a,b,c) = values[a-1] for 1 <= a <= n-1, and 0 at a = 0."""
    values = list(values)
    if len(values) != n - 1:
        raise ValueError(f"need {n - 1} level values, got {len(values)}")
    tri = build_triangle(n)
    return TriangleFunction(n, {v: (values[v[0] - 1] if v[0] > 0 else 0) for v in tri.vertices})


def combination(n: int, m, side: str = "R") -> TriangleFunction:
    """sum_k m_k t_k."""
    total = TriangleFunction(n, {})
    for k, mk in enumerate(m, start=1):
        if mk:
            total = total + tropical_t(n, k, side).scaled(mk)
    return total


# ==============================================================================
# RHOMBUS NUMBERS
# ==============================================================================
def rhombus(f: TriangleFunction) -> RhombusNumbers:
    n = f.n
    top, bl, br = {}, {}, {}
    for i in range(1, n):
        for j in range(1, n - i + 1):
            m = n - i - j
            top[(i, j)] = (f[(m + 1, i, j - 1)] + f[(m, i, j)] - f[(m + 1, i - 1, j)] - f[(m, i + 1, j - 1)]) / n
            bl[(i, j)] = (f[(i, j - 1, m + 1)] + f[(i, j, m)] - f[(i - 1, j, m + 1)] - f[(i + 1, j - 1, m)]) / n
            br[(i, j)] = (f[(j - 1, m + 1, i)] + f[(j, m, i)] - f[(j, m + 1, i - 1)] - f[(j - 1, m, i + 1)]) / n
    return RhombusNumbers(top, bl, br)


def fan_membership(f: TriangleFunction) -> str:
    """Strongest of 'cone_C', 'fan', 'lattice', 'none'."""
    values = rhombus(f).all_values()
    if not all(v.is_integer for v in values):
        return "none"
    if any(v < 0 for v in values):
        return "lattice"
    if all(f.values[v] == 0 for v in f.values if v[0] == 0):
        return "cone_C"
    return "fan"


def decompose(f: TriangleFunction) -> list[sp.Rational]:
    """c_k = r(f)^bl_{k,1}, so that f = sum c_k t^R_k for members of the cone."""
    bl = rhombus(f).bottom_left
    return [bl[(k, 1)] for k in range(1, f.n)]


# ==============================================================================
# T MATRIX
# ==============================================================================
def t_matrix(n: int) -> sp.Matrix:
    """T_ij = t^R_j(n-i)."""
    return sp.Matrix(n - 1, n - 1, lambda i, j: tropical_value(n, j + 1, "R", n - (i + 1)))


def banded_t_inverse(n: int) -> sp.Matrix:
    """(1/n) times the anti-diagonal band 2 on i+j = n, -1 beside it."""
    def entry(i, j):
        s = (i + 1) + (j + 1)
        if s == n:
            return sp.Rational(2, n)
        if abs(s - n) == 1:
            return sp.Rational(-1, n)
        return sp.Integer(0)

    return sp.Matrix(n - 1, n - 1, entry)


def verify_t_inverse(n: int) -> bool:
    return t_matrix(n) * banded_t_inverse(n) == sp.eye(n - 1)


# ==============================================================================
# HILBERT BASIS
# ==============================================================================
@dataclass
class HilbertReport:
    n: int
    bound: int
    scale: int
    members: int
    basis: list[TriangleFunction]
    certified: bool
    decomposition_ok: bool


def _level_grid(n: int, bound: int, scale: int) -> np.ndarray:
    axis = np.arange(bound * scale + 1, dtype=np.int64)
    mesh = np.meshgrid(*([axis] * (n - 1)), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _cone_mask(numerators: np.ndarray, n: int, scale: int) -> np.ndarray:
    """Level vectors (numerators over `scale`) whose bottom-left rhombi are natural."""
    padded = np.pad(numerators, ((0, 0), (1, 1)))
    second = 2 * padded[:, 1:-1] - padded[:, :-2] - padded[:, 2:]
    # rhombus = second / (n * scale) must be a natural number
    return np.all((second >= 0) & (second % (n * scale) == 0), axis=1)


def hilbert_basis(n: int, bound: int) -> HilbertReport:
    """
    Cone members with values <= bound are level functions (each value
    independent of b, c), so the search runs over (f(1), ..., f(n-1)) with
    numerators over `scale`. Irreducibles are found among the members.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if bound < 1:
        raise ValueError(f"bound must be positive, got {bound}")
    scale = n if (bound * n + 1) ** (n - 1) <= GRID_CAP else 1
    if scale == 1:
        logger.warning(f"⚠️ n={n}, bound={bound}: grid too large for denominators {n}, searching integer values")
    grid = _level_grid(n, bound, scale)
    members = grid[_cone_mask(grid, n, scale)]
    members = members[np.any(members != 0, axis=1)]
    logger.info(f"🔎 n={n}: {len(members)} nonzero cone members with values <= {bound}")

    member_set = {tuple(int(x) for x in row) for row in members}
    irreducible = []
    for row in members:
        key = tuple(int(x) for x in row)
        diffs = members[np.all(members <= row, axis=1)]
        reducible = any(
            tuple(int(x) for x in (row - d)) in member_set for d in diffs if tuple(int(x) for x in d) != key
        )
        if not reducible:
            irreducible.append(key)

    basis = [level_function(n, [sp.Rational(x, scale) for x in key]) for key in sorted(irreducible)]
    decomposition_ok = True
    for row in members:
        f = level_function(n, [sp.Rational(int(x), scale) for x in row])
        coeffs = decompose(f)
        if not all(c.is_integer and c >= 0 for c in coeffs) or combination(n, coeffs) != f:
            decomposition_ok = False
            logger.error(f"❌ Cone member {list(row)} / {scale} does not decompose over t^R")
            break

    max_value = max((max(b.values.values()) for b in basis), default=0)
    certified = bound >= n * n and max_value <= bound
    if not certified:
        logger.warning(f"⚠️ Hilbert basis for n={n} not certified at bound {bound}")
    return HilbertReport(n, bound, scale, len(members), basis, certified, decomposition_ok)


# ==============================================================================
# ANNULUS
# ==============================================================================
def satisfies_gluing(point: AnnulusFanPoint) -> bool:
    n = point.left.n
    return all(
        point.left[(a, 0, n - a)] == point.right[(n - a, 0, a)]
        and point.left[(a, n - a, 0)] == point.right[(n - a, a, 0)]
        for a in range(0, n + 1)
    )


def compositions(parts: int, max_total: int):
    """All tuples of `parts` naturals with sum <= max_total."""
    for m in itertools.product(range(max_total + 1), repeat=parts):
        if sum(m) <= max_total:
            yield m


def annulus_fan_points(n: int, max_total: int) -> list[AnnulusFanPoint]:
    if max_total < 0:
        raise ValueError(f"max_total must be >= 0, got {max_total}")
    points = []
    for m in compositions(n - 1, max_total):
        point = AnnulusFanPoint(combination(n, m, "L"), combination(n, m, "R"), tuple(m))
        if not satisfies_gluing(point):
            raise RuntimeError(f"annulus point for m={m} violates the gluing equalities")
        points.append(point)
    return points


def glued_pairs(n: int, bound: int) -> list[tuple[TriangleFunction, TriangleFunction]]:
    """
    All pairs of cone members with integer values <= bound that satisfy the
    gluing equalities; each one must equal (sum m_k t^L_k, sum m_k t^R_k).
    """
    grid = _level_grid(n, bound, 1)
    members = [tuple(int(x) for x in row) for row in grid[_cone_mask(grid, n, 1)]]
    pairs = []
    for fl, fr in itertools.product(members, repeat=2):
        left, right = level_function(n, fl), level_function(n, fr)
        point = AnnulusFanPoint(left, right)
        if not satisfies_gluing(point):
            continue
        m = decompose(right)
        if combination(n, m, "L") != left or combination(n, m, "R") != right:
            raise RuntimeError(f"glued pair {fl}/{fr} is not a tropical combination")
        pairs.append((left, right))
    return pairs
