"""
State-sum quantum trace over the two-triangle triangulation of the annulus.

The left triangle carries the arcs A_{L,1..n-k} with states (l, l'), the right
triangle the arcs A_{R,1..k} with states (i, i'); the source web sits in the
right biangle and the sink web in the left one. Both triangles use L^omega in
their own coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, prod

from src.algebra.fg_matrices import QMatrix, left_matrix, right_matrix
from src.algebra.quantum_torus import (
    DiscreteTriangle,
    QuiverForm,
    TensorElement,
    TorusElement,
    build_quiver,
    build_triangle,
    mul,
)
from src.algebra.scalars import (
    LaurentScalar,
    RingContext,
    eval_numeric,
    q_pow,
    qfact,
    qint,
    w_half_for_q,
)
from src.logic.biangle_counit import (
    CounitConstants,
    StatePattern,
    counit_sink,
    counit_source,
    counit_through_strand,
)
from src.logic.tropical_fan import combination, compositions, t_matrix, banded_t_inverse, tropical_t
from src.utils.logger import setup_logger

logger = setup_logger("annulus_trace")


@dataclass(frozen=True)
class AnnulusContext:
    ring: RingContext
    left_tri: DiscreteTriangle
    right_tri: DiscreteTriangle
    left_quiver: QuiverForm
    right_quiver: QuiverForm
    counit: CounitConstants
    # rotation applied to L^omega in each triangle
    left_rotation: int = 0
    right_rotation: int = 0
    # the simple loop crosses the left triangle on a right-turning arc
    loop_left_rotation: int = 1

    @property
    def n(self) -> int:
        return self.ring.n

    def left_arc_matrix(self) -> QMatrix:
        return left_matrix(self.n).rotate(self.left_rotation)

    def right_arc_matrix(self) -> QMatrix:
        return left_matrix(self.n).rotate(self.right_rotation)

    def loop_left_matrix(self) -> QMatrix:
        return right_matrix(self.n).rotate(self.loop_left_rotation)


def build_annulus(n: int, counit: CounitConstants | None = None) -> AnnulusContext:
    ring = RingContext(n)
    tri = build_triangle(n)
    quiver = build_quiver(tri)
    return AnnulusContext(
        ring=ring,
        left_tri=tri,
        right_tri=tri,
        left_quiver=quiver,
        right_quiver=quiver,
        counit=counit or CounitConstants.default(ring),
    )


@dataclass
class TraceReport:
    element: TensorElement
    highest: tuple[tuple[int, ...], tuple[int, ...]] | None
    coefficient: LaurentScalar
    extras: dict = field(default_factory=dict)


def _report(element: TensorElement) -> TraceReport:
    top = element.highest_degree()
    if top is None:
        return TraceReport(element, None, LaurentScalar.zero())
    dl, dr, coeff = top
    return TraceReport(element, (dl, dr), coeff)


def _check_k(ctx: AnnulusContext, k: int):
    if not 1 <= k <= ctx.n - 1:
        raise ValueError(f"basis web index k={k} outside 1..{ctx.n - 1}")


# ==============================================================================
# STATE SUMS
# ==============================================================================
def _ordered_product(M: QMatrix, pairs) -> TorusElement:
    result = TorusElement.one(M.quiver)
    for s, t in pairs:
        entry = M[s, t]
        if entry.is_zero:
            return TorusElement.zero(M.quiver)
        result = mul(result, entry, M.quiver)
    return result


def _trace_by_states(ctx: AnnulusContext, k: int) -> TensorElement:
    """Literal enumeration of every admissible (i, l, i', l') state tuple."""
    n = ctx.n
    ML, MR = ctx.left_arc_matrix(), ctx.right_arc_matrix()
    total = TensorElement(ctx.left_quiver, ctx.right_quiver)
    full = set(range(1, n + 1))
    source_states = []
    for i_states in itertools.permutations(range(1, n + 1), k):
        rest = sorted(full - {n + 1 - x for x in i_states})
        for l_states in itertools.permutations(rest):
            eps = counit_source(ctx.ring, StatePattern(n, k, i_states, l_states), ctx.counit)
            if eps:
                source_states.append((i_states, l_states, eps))
    sink_states = []
    for ip_states in itertools.permutations(range(1, n + 1), k):
        rest = sorted(full - {n + 1 - x for x in ip_states})
        for lp_states in itertools.permutations(rest):
            eps = counit_sink(ctx.ring, StatePattern(n, k, ip_states, lp_states), ctx.counit)
            if eps:
                sink_states.append((ip_states, lp_states, eps))

    for i_states, l_states, eps_src in source_states:
        for ip_states, lp_states, eps_snk in sink_states:
            left = _ordered_product(ML, zip(l_states, lp_states))
            if left.is_zero:
                continue
            right = _ordered_product(MR, zip(i_states, ip_states))
            if right.is_zero:
                continue
            total = total + TensorElement.pure(left, right).scale(eps_snk * eps_src)
    return total


class _MinorExpansion:
    """
    D(R, C) = sum over orderings r_1.., c_1.. of R and C of
    perm^(inv(r) + inv(c)) M(r_1,c_1) M(r_2,c_2) ...
    """

    def __init__(self, M: QMatrix, perm: LaurentScalar, lower_triangular: bool):
        self.M = M
        self.perm = perm
        self.lower = lower_triangular
        self._memo: dict[tuple[frozenset, frozenset], TorusElement] = {}

    def __call__(self, rows: frozenset, cols: frozenset) -> TorusElement:
        key = (rows, cols)
        if key in self._memo:
            return self._memo[key]
        if not rows:
            value = TorusElement.one(self.M.quiver)
        else:
            value = TorusElement.zero(self.M.quiver)
            for r in sorted(rows):
                r_inv = sum(1 for x in rows if x < r)
                for c in sorted(cols):
                    if self.lower and c > r:
                        continue
                    entry = self.M[r, c]
                    if entry.is_zero:
                        continue
                    rest = self(rows - {r}, cols - {c})
                    if rest.is_zero:
                        continue
                    c_inv = sum(1 for y in cols if y < c)
                    term = mul(entry, rest, self.M.quiver).scale(self.perm ** (r_inv + c_inv))
                    value = value + term
        self._memo[key] = value
        return value


def _crossings(first: set[int], second: set[int]) -> int:
    return sum(1 for x in first for y in second if x > y)


def _trace_by_minors(ctx: AnnulusContext, k: int) -> TensorElement:
    """The state sum regrouped by state sets; orderings collapse into D(R, C)."""
    n = ctx.n
    consts = ctx.counit
    left_D = _MinorExpansion(ctx.left_arc_matrix(), consts.perm_factor, ctx.left_rotation == 0)
    right_D = left_D if ctx.right_rotation == ctx.left_rotation else _MinorExpansion(
        ctx.right_arc_matrix(), consts.perm_factor, ctx.right_rotation == 0
    )
    full = frozenset(range(1, n + 1))

    def complement_bar(s: frozenset) -> frozenset:
        return frozenset(n + 1 - x for x in full - s)

    total = TensorElement(ctx.left_quiver, ctx.right_quiver)
    subsets = [frozenset(s) for s in itertools.combinations(range(1, n + 1), k)]
    for I in subsets:
        L = complement_bar(I)
        cross_src = _crossings(set(I), set(full - I))
        for Ip in subsets:
            Lp = complement_bar(Ip)
            Ip_bar = {n + 1 - x for x in Ip}
            cross_snk = _crossings(set(Lp), Ip_bar)
            left = left_D(L, Lp)
            if left.is_zero:
                continue
            right = right_D(I, Ip)
            if right.is_zero:
                continue
            scalar = (
                consts.base_source
                * consts.base_sink
                * consts.perm_factor ** (cross_src + cross_snk)
                * consts.state_weight ** (sum(L) + sum(Ip))
            )
            total = total + TensorElement.pure(left, right).scale(scalar)
    return total


@lru_cache(maxsize=None)
def _cached_basis_web(ctx: AnnulusContext, k: int, method: str) -> TensorElement:
    if method == "minors":
        element = _trace_by_minors(ctx, k)
    elif method == "states":
        element = _trace_by_states(ctx, k)
    else:
        raise ValueError(f"unknown state-sum method {method!r}")
    logger.info(f"🌀 Traced B_{k} for n={ctx.n} ({method}): {len(element)} terms")
    return element


def trace_basis_web(ctx: AnnulusContext, k: int, method: str = "minors") -> TensorElement:
    _check_k(ctx, k)
    return _cached_basis_web(ctx, k, method)


def trace_monomial(ctx: AnnulusContext, m) -> TraceReport:
    """Trace of B_1^m_1 ... B_{n-1}^m_{n-1}."""
    m = tuple(int(x) for x in m)
    if len(m) != ctx.n - 1 or any(x < 0 for x in m):
        raise ValueError(f"powers must be {ctx.n - 1} naturals, got {m}")
    element = TensorElement.one(ctx.left_quiver, ctx.right_quiver)
    for k, mk in enumerate(m, start=1):
        for _ in range(mk):
            element = element * trace_basis_web(ctx, k)
    report = _report(element)
    expected_l = combination(ctx.n, m, "L").key()
    expected_r = combination(ctx.n, m, "R").key()
    report.extras["expected_highest"] = (
        tuple(int(x) for x in expected_l),
        tuple(int(x) for x in expected_r),
    )
    report.extras["additive"] = report.highest == report.extras["expected_highest"]
    return report


def trace_simple_loop(ctx: AnnulusContext) -> TraceReport:
    """sum_{s,t} rotR(t,s) (x) L(s,t), contracted through the biangles."""
    n = ctx.n
    ML = ctx.loop_left_matrix()
    MR = ctx.right_arc_matrix()
    total = TensorElement(ctx.left_quiver, ctx.right_quiver)
    for s in range(1, n + 1):
        for t in range(1, n + 1):
            right = MR[s, t]
            if right.is_zero:
                continue
            for s2 in range(1, n + 1):
                for t2 in range(1, n + 1):
                    weight = counit_through_strand(s, s2) * counit_through_strand(t, t2)
                    if not weight:
                        continue
                    left = ML[t2, s2]
                    if left.is_zero:
                        continue
                    total = total + TensorElement.pure(left, right).scale(weight)
    report = _report(total)
    report.extras["all_coefficients_one"] = all(c == LaurentScalar.one() for c in total.terms.values())
    return report


# ==============================================================================
# VERIFICATION
# ==============================================================================
def expected_highest_coefficient(ctx: AnnulusContext, k: int) -> LaurentScalar:
    """q^((n-k)(n-k-1)/2)[n-k]! q^(k(k-1)/2)[k]!."""
    n, ring = ctx.n, ctx.ring
    return q_pow(ring, comb(n - k, 2)) * qfact(ring, n - k) * q_pow(ring, comb(k, 2)) * qfact(ring, k)


def highest_degree_report(ctx: AnnulusContext, k: int, method: str = "minors") -> dict:
    element = trace_basis_web(ctx, k, method)
    report = _report(element)
    tl = tuple(int(x) for x in tropical_t(ctx.n, k, "L").key())
    tr = tuple(int(x) for x in tropical_t(ctx.n, k, "R").key())
    expected = expected_highest_coefficient(ctx, k)
    unit = report.coefficient.unit_ratio(expected) if report.highest else None
    ok = report.highest == (tl, tr) and unit is not None
    if not ok:
        logger.error(f"❌ Highest degree of B_{k} (n={ctx.n}) does not match the tropical prediction")
    return {
        "n": ctx.n,
        "k": k,
        "ok": ok,
        "highest_left": list(report.highest[0]) if report.highest else None,
        "highest_right": list(report.highest[1]) if report.highest else None,
        "coefficient": report.coefficient,
        "unit": unit,
        "terms": len(element),
    }


def peeling_factor(ctx: AnnulusContext) -> LaurentScalar:
    """prod_{k=1..n-1} q^(-k) [n-k]."""
    ring = ctx.ring
    return prod((ring.q(-k) * qint(ring, ctx.n - k) for k in range(1, ctx.n)), start=LaurentScalar.one())


def verify_peeling(ctx: AnnulusContext) -> dict:
    web = trace_basis_web(ctx, 1)
    loop = trace_simple_loop(ctx).element.scale(peeling_factor(ctx))
    unit = web.unit_ratio(loop)
    if unit is None:
        logger.error(f"❌ B_1 is not a unit multiple of the peeled loop for n={ctx.n}")
    return {"n": ctx.n, "ok": unit is not None, "unit": unit}


def degenerate_ranks(
    ctx: AnnulusContext, q: complex, tol: float = 1e-9, coefficients: dict[int, LaurentScalar] | None = None
) -> list[int]:
    """Ranks k whose computed highest-degree coefficient vanishes at the given q."""
    if coefficients is None:
        coefficients = {k: highest_degree_report(ctx, k)["coefficient"] for k in range(1, ctx.n)}
    w = w_half_for_q(ctx.ring, q)
    ranks = []
    for k, coefficient in sorted(coefficients.items()):
        if abs(eval_numeric(coefficient, w)) < tol:
            ranks.append(k)
    return ranks


def independence_check(ctx: AnnulusContext, max_total: int) -> dict:
    """
    Injectivity of m -> sum m_k t^R_k on the a = 1..n-1 levels for all
    sum m_k <= max_total, and the T matrix against its banded inverse.
    """
    if max_total < 1:
        raise ValueError(f"max_total must be >= 1, got {max_total}")
    n = ctx.n
    T = t_matrix(n)
    T_inv = banded_t_inverse(n)
    inverse_ok = T * T_inv == T.eye(n - 1) and T.inv() == T_inv

    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    collisions = []
    for m in compositions(n - 1, max_total):
        vec = tuple(sum(mk * T[n - 1 - a, k] for k, mk in enumerate(m)) for a in range(1, n))
        if vec in seen:
            collisions.append((seen[vec], m))
        else:
            seen[vec] = m
    injective = not collisions
    if not injective:
        logger.error(f"❌ Degree vectors collide for n={n}: {collisions[:3]}")
    logger.info(f"📐 Independence n={n}, max_total={max_total}: {len(seen)} distinct degree vectors")
    return {
        "n": n,
        "max_total": max_total,
        "count": len(seen) + len(collisions),
        "distinct": len(seen),
        "injective": injective,
        "t_matrix": [[int(x) for x in T.row(i)] for i in range(n - 1)],
        "t_inverse": [[str(x) for x in T_inv.row(i)] for i in range(n - 1)],
        "inverse_ok": bool(inverse_ok),
        "ok": injective and bool(inverse_ok),
    }
