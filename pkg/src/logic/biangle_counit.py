"""Biangle co-unit values for source/sink webs and through-strands."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Sequence

from src.algebra.scalars import LaurentScalar, RingContext, qfact, q_pow
from src.utils.logger import setup_logger

logger = setup_logger("biangle_counit")


@dataclass(frozen=True)
class StatePattern:
    n: int
    k: int
    i_states: tuple[int, ...]
    l_states: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError(f"k={self.k} outside 0..{self.n}")
        if len(self.i_states) != self.k or len(self.l_states) != self.n - self.k:
            raise ValueError(
                f"state lengths {len(self.i_states)}/{len(self.l_states)} do not match k={self.k}, n-k={self.n - self.k}"
            )
        for s in (*self.i_states, *self.l_states):
            if not 1 <= s <= self.n:
                raise ValueError(f"state {s} outside 1..{self.n}")

    def bar(self, s: int) -> int:
        return self.n + 1 - s


@dataclass(frozen=True)
class CounitConstants:
    """
    perm_factor accompanies each unit of permutation length, state_weight each
    unit of the summed barred states. Loaded from config/counit_constants.json.
    """

    base_source: LaurentScalar
    base_sink: LaurentScalar
    perm_factor: LaurentScalar
    state_weight: LaurentScalar

    @classmethod
    def default(cls, ctx: RingContext) -> "CounitConstants":
        minus_q = LaurentScalar.monomial(ctx.q_unit, -1)
        return cls(
            base_source=LaurentScalar.one(),
            base_sink=LaurentScalar.one(),
            perm_factor=minus_q,
            state_weight=minus_q.inverse(),
        )


def perm_length(sigma: Sequence[int]) -> int:
    """Inversion count, i.e. the minimal number of adjacent transpositions."""
    values = list(sigma)
    if sorted(values) != list(range(min(values, default=1), min(values, default=1) + len(values))):
        raise ValueError(f"{sigma} is not a permutation")
    return sum(1 for a, b in itertools.combinations(values, 2) if a > b)


def _merged_length(seq: list[int], n: int) -> int | None:
    if len(set(seq)) < n:
        return None
    return sum(1 for a, b in itertools.combinations(seq, 2) if a > b)


def counit_source(ctx: RingContext, pattern: StatePattern, consts: CounitConstants) -> LaurentScalar:
    """Source web W_source(k): permutation (i_1 .. i_k, lbar_{n-k} .. lbar_1)."""
    ctx.check_same(RingContext(pattern.n))
    seq = list(pattern.i_states) + [pattern.bar(l) for l in reversed(pattern.l_states)]
    length = _merged_length(seq, pattern.n)
    if length is None:
        return LaurentScalar.zero()
    return consts.base_source * consts.perm_factor**length * consts.state_weight ** sum(pattern.l_states)


def counit_sink(ctx: RingContext, pattern: StatePattern, consts: CounitConstants) -> LaurentScalar:
    """
    Sink web W_sink(n-k): pattern.l_states are the l' states, pattern.i_states
    the i' states; permutation (l'_1 .. l'_{n-k}, i'bar_k .. i'bar_1).
    """
    ctx.check_same(RingContext(pattern.n))
    seq = list(pattern.l_states) + [pattern.bar(i) for i in reversed(pattern.i_states)]
    length = _merged_length(seq, pattern.n)
    if length is None:
        return LaurentScalar.zero()
    return consts.base_sink * consts.perm_factor**length * consts.state_weight ** sum(pattern.i_states)


def counit_through_strand(i: int, j: int) -> LaurentScalar:
    return LaurentScalar.one() if i == j else LaurentScalar.zero()


def qsum_over_symmetric_group(ctx: RingContext, k: int) -> LaurentScalar:
    """Brute-force sum over Sym_k of (-q)^(2 l(sigma))."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    q2 = ctx.q(2)
    total = LaurentScalar.zero()
    for sigma in itertools.permutations(range(1, k + 1)):
        total = total + q2 ** perm_length(sigma)
    return total


def symmetric_sum_closed_form(ctx: RingContext, k: int) -> LaurentScalar:
    """q^(k(k-1)/2) [k]!."""
    return q_pow(ctx, comb(k, 2)) * qfact(ctx, k)


# ==============================================================================
# VERIFICATION
# ==============================================================================
def sorted_patterns(n: int, k: int):
    """
    Reference configurations: i increasing, l increasing, with the barred l
    states filling the complement of the i states.
    """
    for i_set in itertools.combinations(range(1, n + 1), k):
        l_set = sorted(n + 1 - x for x in range(1, n + 1) if x not in i_set)
        yield tuple(i_set), tuple(l_set)


def verify_symmetric_sum(ctx: RingContext, n: int, k: int, consts: CounitConstants) -> bool:
    """
    For each reference configuration, sum counit_sink * counit_source over
    simultaneous reorderings (l_sigma', l_sigma') and (i_sigma, i_sigma) and
    compare with q^((n-k)(n-k-1)/2)[n-k]! q^(k(k-1)/2)[k]! times the reference
    product.
    """
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} outside 1..{n - 1}")
    factor = symmetric_sum_closed_form(ctx, n - k) * symmetric_sum_closed_form(ctx, k)
    for i_ref, l_ref in sorted_patterns(n, k):
        ref = counit_sink(ctx, StatePattern(n, k, i_ref, l_ref), consts) * counit_source(
            ctx, StatePattern(n, k, i_ref, l_ref), consts
        )
        total = LaurentScalar.zero()
        for sigma in itertools.permutations(range(k)):
            i_perm = tuple(i_ref[s] for s in sigma)
            for tau in itertools.permutations(range(n - k)):
                l_perm = tuple(l_ref[t] for t in tau)
                pat = StatePattern(n, k, i_perm, l_perm)
                total = total + counit_sink(ctx, pat, consts) * counit_source(ctx, pat, consts)
        if total != factor * ref:
            logger.error(f"❌ Symmetric co-unit sum fails for n={n}, k={k}, i={i_ref}, l={l_ref}")
            return False
    return True


def verify_zero_detection(ctx: RingContext, n: int, consts: CounitConstants) -> bool:
    """Exhaustive: co-units vanish exactly when the merged states repeat."""
    states = range(1, n + 1)
    for k in range(0, n + 1):
        for i_states in itertools.product(states, repeat=k):
            for l_states in itertools.product(states, repeat=n - k):
                pat = StatePattern(n, k, i_states, l_states)
                src_merged = set(i_states) | {n + 1 - l for l in l_states}
                snk_merged = set(l_states) | {n + 1 - i for i in i_states}
                if counit_source(ctx, pat, consts).is_zero != (len(src_merged) < n):
                    logger.error(f"❌ Source zero test fails for {pat}")
                    return False
                if counit_sink(ctx, pat, consts).is_zero != (len(snk_merged) < n):
                    logger.error(f"❌ Sink zero test fails for {pat}")
                    return False
    return True
