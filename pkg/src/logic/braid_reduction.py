"""
Reduction of annular braid closures to polynomials in the power knots gamma_m.

Conventions
    sigma_i^{+1}: the strand moving from position i-1 to i (0-based) passes over.
    gamma_m:      closure of sigma_1 sigma_2 ... sigma_{m-1}, writhe m-1.
    ascending:    traversal starts on the strand leaving the top position m-1;
                  at every crossing the strand met later is over.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
import sympy as sp

from src.algebra.scalars import (
    LaurentScalar,
    RingContext,
    eval_numeric,
    in_bad_set,
    q_pow,
    qint,
    scalar_from_sympy_q,
    w_half_for_q_root,
)
from src.logic.biangle_counit import perm_length
from src.utils.logger import setup_logger

logger = setup_logger("braid_reduction")

Letter = tuple[int, int]
Monomial = tuple[int, ...]


# ==============================================================================
# TYPES
# ==============================================================================
@dataclass(frozen=True)
class BraidWord:
    strands: int
    word: tuple[Letter, ...] = ()

    def __post_init__(self):
        if self.strands < 1:
            raise ValueError(f"a braid needs at least one strand, got {self.strands}")
        clean = []
        for letter in self.word:
            i, s = int(letter[0]), int(letter[1])
            if not 1 <= i <= self.strands - 1:
                raise ValueError(f"generator index {i} outside 1..{self.strands - 1}")
            if s not in (1, -1):
                raise ValueError(f"generator sign must be +1 or -1, got {s}")
            clean.append((i, s))
        object.__setattr__(self, "word", tuple(clean))

    @classmethod
    def parse(cls, strands: int, text: str) -> "BraidWord":
        """'1 -2 1' -> sigma_1 sigma_2^-1 sigma_1."""
        letters = []
        for token in text.replace(",", " ").split():
            try:
                value = int(token)
            except ValueError:
                raise ValueError(f"malformed braid letter {token!r}") from None
            if value == 0:
                raise ValueError("braid letter 0 is not a generator")
            letters.append((abs(value), 1 if value > 0 else -1))
        return cls(strands, tuple(letters))

    @property
    def writhe(self) -> int:
        return sum(s for _, s in self.word)


@dataclass(frozen=True)
class Crossing:
    position: int  # 0-based lower position
    sign: int
    over: int
    under: int
    before: tuple[int, ...]  # labels by position just before the crossing


@dataclass(frozen=True)
class ClosureState:
    braid: BraidWord
    crossings: tuple[Crossing, ...]
    successor: tuple[int, ...]  # label -> label of the strand it closes up into
    components: tuple[tuple[int, ...], ...]  # sorted by smallest label

    @property
    def is_knot(self) -> bool:
        return len(self.components) == 1


def simulate(braid: BraidWord) -> ClosureState:
    at = list(range(braid.strands))
    crossings = []
    for i, s in braid.word:
        p = i - 1
        up, down = at[p], at[p + 1]
        over, under = (up, down) if s > 0 else (down, up)
        crossings.append(Crossing(p, s, over, under, tuple(at)))
        at[p], at[p + 1] = down, up
    end = [0] * braid.strands
    for pos, label in enumerate(at):
        end[label] = pos
    seen, components = set(), []
    for start in range(braid.strands):
        if start in seen:
            continue
        cycle, x = [], start
        while x not in seen:
            seen.add(x)
            cycle.append(x)
            x = end[x]
        components.append(tuple(sorted(cycle)))
    components.sort(key=min)
    return ClosureState(braid, tuple(crossings), tuple(end), tuple(components))


class GammaPolynomial:
    """Sum of coeff * gamma_{m_1} ... gamma_{m_p}, keyed by sorted (m_1, ..., m_p)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, LaurentScalar] | None = None):
        acc: dict[Monomial, LaurentScalar] = {}
        for key, c in (terms or {}).items():
            key = tuple(sorted(int(x) for x in key))
            if any(x < 1 for x in key):
                raise ValueError(f"gamma indices must be >= 1, got {key}")
            acc[key] = acc[key] + c if key in acc else LaurentScalar.coerce(c)
        self.terms = {k: c for k, c in acc.items() if c}

    @classmethod
    def gamma(cls, m: int, coeff: LaurentScalar | None = None) -> "GammaPolynomial":
        return cls({(m,): coeff if coeff is not None else LaurentScalar.one()})

    @classmethod
    def one(cls) -> "GammaPolynomial":
        return cls({(): LaurentScalar.one()})

    def __add__(self, other: "GammaPolynomial") -> "GammaPolynomial":
        merged = dict(self.terms)
        for k, c in other.terms.items():
            merged[k] = merged[k] + c if k in merged else c
        return GammaPolynomial(merged)

    def scale(self, s: LaurentScalar) -> "GammaPolynomial":
        return GammaPolynomial({k: c * s for k, c in self.terms.items()})

    def __mul__(self, other: "GammaPolynomial") -> "GammaPolynomial":
        acc: dict[Monomial, LaurentScalar] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = tuple(sorted(k1 + k2))
                acc[key] = acc[key] + c1 * c2 if key in acc else c1 * c2
        return GammaPolynomial(acc)

    def coefficient(self, key: Iterable[int]) -> LaurentScalar:
        return self.terms.get(tuple(sorted(key)), LaurentScalar.zero())

    def specialize(self, w_half: complex) -> dict[Monomial, complex]:
        return {k: eval_numeric(c, w_half) for k, c in self.terms.items()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, GammaPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        return f"GammaPolynomial({len(self.terms)} monomials)"


@dataclass(frozen=True)
class SkeinConstants:
    """alpha_plus X_+ + alpha_minus X_- = alpha_zero X_0, plus kink and unknot values."""

    alpha_plus: LaurentScalar
    alpha_minus: LaurentScalar
    alpha_zero: LaurentScalar
    kink: LaurentScalar
    unknot: LaurentScalar

    def __post_init__(self):
        for name in ("alpha_plus", "alpha_minus", "kink"):
            if not getattr(self, name).is_unit:
                raise ValueError(f"skein constant {name} must be a unit monomial, got {getattr(self, name)!r}")

    @classmethod
    def default(cls, ctx: RingContext) -> "SkeinConstants":
        """q^(1/n) X_+ - q^(-1/n) X_- = (q - q^-1) X_0, kink (-1)^(n-1) q^((n^2-1)/n), unknot (-1)^(n-1)[n]."""
        n = ctx.n
        sign = -1 if (n - 1) % 2 else 1
        return cls(
            alpha_plus=ctx.q_root(1),
            alpha_minus=LaurentScalar.monomial(-ctx.q_root_unit, -1),
            alpha_zero=ctx.q(1) - ctx.q(-1),
            kink=LaurentScalar.monomial((n * n - 1) * ctx.q_root_unit, sign),
            unknot=qint(ctx, n) * sign,
        )

    def alpha(self, sign: int) -> LaurentScalar:
        return self.alpha_plus if sign > 0 else self.alpha_minus


def check_skein_consistency(ctx: RingContext, consts: SkeinConstants) -> bool:
    """alpha_+ kink + alpha_- kink^-1 == alpha_0 unknot."""
    lhs = consts.alpha_plus * consts.kink + consts.alpha_minus * consts.kink.inverse()
    return lhs == consts.alpha_zero * consts.unknot


# ==============================================================================
# REDUCTION
# ==============================================================================
def free_reduce(word: Iterable[Letter]) -> tuple[Letter, ...]:
    """Cancel adjacent sigma_i sigma_i^-1 pairs."""
    stack: list[Letter] = []
    for letter in word:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def restrict(state: ClosureState, labels: tuple[int, ...]) -> BraidWord:
    """Sub-braid on one component's strands, keeping only its own crossings."""
    members = set(labels)
    word = []
    for c in state.crossings:
        if c.over in members and c.under in members:
            r = sum(1 for lab in c.before[: c.position] if lab in members)
            word.append((r + 1, c.sign))
    return BraidWord(len(labels), tuple(word))


class BraidReducer:
    """
    Crossing-change reduction with a per-instance memo keyed by
    (strands, freely reduced word).
    """

    def __init__(self, ctx: RingContext, consts: SkeinConstants, strategy: str = "leftmost"):
        if strategy not in ("leftmost", "rightmost"):
            raise ValueError(f"unknown resolution strategy {strategy!r}")
        self.ctx = ctx
        self.consts = consts
        self.strategy = strategy
        self._memo: dict[tuple[int, tuple[Letter, ...]], GammaPolynomial] = {}
        self._flip = {s: -(consts.alpha(-s) / consts.alpha(s)) for s in (1, -1)}
        self._smooth = {s: consts.alpha_zero / consts.alpha(s) for s in (1, -1)}

    def reduce(self, braid: BraidWord) -> GammaPolynomial:
        word = free_reduce(braid.word)
        key = (braid.strands, word)
        if key in self._memo:
            return self._memo[key]
        result = self._reduce(BraidWord(braid.strands, word))
        bad = [k for k in result.terms if sum(k) != braid.strands]
        if bad:
            raise RuntimeError(f"winding not conserved for {braid}: monomials {bad}")
        self._memo[key] = result
        return result

    def _pick(self, bad: list[int]) -> int:
        return bad[0] if self.strategy == "leftmost" else bad[-1]

    def _switch(self, braid: BraidWord, idx: int) -> GammaPolynomial:
        i, s = braid.word[idx]
        flipped = braid.word[:idx] + ((i, -s),) + braid.word[idx + 1 :]
        smoothed = braid.word[:idx] + braid.word[idx + 1 :]
        return self.reduce(BraidWord(braid.strands, flipped)).scale(self._flip[s]) + self.reduce(
            BraidWord(braid.strands, smoothed)
        ).scale(self._smooth[s])

    def _reduce(self, braid: BraidWord) -> GammaPolynomial:
        state = simulate(braid)
        if state.is_knot:
            return self._reduce_knot(state)

        rank = {}
        for r, comp in enumerate(state.components):
            for label in comp:
                rank[label] = r
        # a smaller rank sits higher
        bad = [idx for idx, c in enumerate(state.crossings) if rank[c.under] < rank[c.over]]
        if bad:
            return self._switch(braid, self._pick(bad))

        result = GammaPolynomial.one()
        for comp in state.components:
            result = result * self.reduce(restrict(state, comp))
        return result

    def _reduce_knot(self, state: ClosureState) -> GammaPolynomial:
        braid = state.braid
        m = braid.strands
        order, label = {}, m - 1
        for r in range(m):
            order[label] = r
            label = state.successor[label]
        bad = [idx for idx, c in enumerate(state.crossings) if order[c.over] < order[c.under]]
        if bad:
            return self._switch(braid, self._pick(bad))
        return GammaPolynomial.gamma(m, self.consts.kink ** (braid.writhe - (m - 1)))


def close_and_reduce(ctx: RingContext, beta: BraidWord, consts: SkeinConstants, strategy: str = "leftmost") -> GammaPolynomial:
    return BraidReducer(ctx, consts, strategy).reduce(beta)


# ==============================================================================
# P_beta AND P_i
# ==============================================================================
def positive_lift(perm: tuple[int, ...]) -> BraidWord:
    """
    Positive permutation braid sending the strand at position x to perm[x],
    built as a bubble-sort reduced word.
    """
    m = len(perm)
    if sorted(perm) != list(range(m)):
        raise ValueError(f"{perm} is not a permutation of 0..{m - 1}")
    at = list(range(m))
    word = []
    changed = True
    while changed:
        changed = False
        for p in range(m - 1):
            if perm[at[p]] > perm[at[p + 1]]:
                at[p], at[p + 1] = at[p + 1], at[p]
                word.append((p + 1, 1))
                changed = True
    return BraidWord(m, tuple(word))


def p_beta(ctx: RingContext, beta: BraidWord, consts: SkeinConstants, reducer: BraidReducer | None = None) -> LaurentScalar:
    """Coefficient of gamma_i in the reduction of an i-strand closure."""
    reducer = reducer or BraidReducer(ctx, consts)
    return reducer.reduce(beta).coefficient((beta.strands,))


def p_i(ctx: RingContext, i: int, consts: SkeinConstants | None = None) -> LaurentScalar:
    """sum over Sym_i of (-q^((1-n)/n))^l(sigma) P_{positive lift of sigma}."""
    if i < 1:
        raise ValueError(f"i must be >= 1, got {i}")
    if i > ctx.n - 1:
        logger.warning(f"⚠️ P_{i} for n={ctx.n} lies outside the range 1..n-1 where it is unique")
    consts = consts or SkeinConstants.default(ctx)
    reducer = BraidReducer(ctx, consts)
    step = LaurentScalar.monomial((1 - ctx.n) * ctx.q_root_unit, -1)
    total = LaurentScalar.zero()
    for perm in itertools.permutations(range(i)):
        total = total + step ** perm_length(perm) * p_beta(ctx, positive_lift(perm), consts, reducer)
    return total


def closed_form_divisors(i: int) -> list[int]:
    """Orders d >= 3 of the (2j)-th roots of unity, 2 <= j <= i-1."""
    return sorted({d for j in range(2, i) for d in sp.divisors(2 * j) if d >= 3})


def p_closed_form(ctx: RingContext, i: int) -> LaurentScalar:
    """(-1)^(i-1) q^(-(i-1)^2 + (i-1)/n) prod (q - zeta)."""
    q = sp.Symbol("q")
    product = sp.Integer(1)
    for d in closed_form_divisors(i):
        product *= sp.cyclotomic_poly(d, q)
    sign = -1 if (i - 1) % 2 else 1
    return scalar_from_sympy_q(ctx, product, q) * q_pow(ctx, -((i - 1) ** 2)) * ctx.q_root(i - 1) * sign


def basis_web_prefactor(ctx: RingContext, i: int) -> LaurentScalar:
    """q^(n(n-1)) prod_{k=i..n-1} q^-k [n-k]."""
    n = ctx.n
    result = ctx.q(n * (n - 1))
    for k in range(i, n):
        result = result * ctx.q(-k) * qint(ctx, n - k)
    return result


def _x_polynomial(ctx: RingContext, s: LaurentScalar) -> tuple[int, np.ndarray]:
    """(shift, coefficients in x = q^(1/n), highest degree first)."""
    unit = ctx.q_root_unit
    if any(e % unit for e, _ in s.terms):
        raise ValueError(f"{s!r} is not a Laurent polynomial in q^(1/n)")
    low = s.min_exponent // unit
    high = s.max_exponent // unit
    coeffs = np.zeros(high - low + 1, dtype=np.float64)
    for e, c in s.terms:
        coeffs[high - e // unit] = float(c)
    return low, coeffs


def root_report(ctx: RingContext, s: LaurentScalar, tol: float = 1e-9) -> dict:
    """Numeric roots in q^(1/n) and whether every q = x^n lies in the bad set."""
    if s.is_zero:
        return {"roots": [], "all_in_bad_set": False, "error": "zero polynomial"}
    _, coeffs = _x_polynomial(ctx, s)
    if len(coeffs) <= 1:
        return {"roots": [], "all_in_bad_set": True, "error": None}
    try:
        roots = np.roots(coeffs)
    except np.linalg.LinAlgError as e:
        logger.error(f"❌ Root finding failed: {e}")
        return {"roots": [], "all_in_bad_set": False, "error": str(e)}
    residual = max(abs(np.polyval(coeffs, r)) for r in roots) / max(1.0, float(np.max(np.abs(coeffs))))
    if residual > 1e-6:
        logger.error(f"❌ Root residual {residual:.2e} too large to certify")
        return {"roots": [complex(r) for r in roots], "all_in_bad_set": False, "error": f"residual {residual:.2e}"}
    in_q = [in_bad_set(complex(r) ** ctx.n, ctx.n, tol) for r in roots]
    return {"roots": [complex(r) for r in roots], "all_in_bad_set": all(in_q), "error": None}


def verify_p_closed_form(
    ctx: RingContext, i: int, consts: SkeinConstants | None = None, tol: float = 1e-9, value: LaurentScalar | None = None
) -> dict:
    if not 1 <= i <= 4:
        raise ValueError(f"closed form is asserted for 1 <= i <= 4, got {i}")
    value = value if value is not None else p_i(ctx, i, consts)
    expected = p_closed_form(ctx, i)
    roots = root_report(ctx, value, tol)
    report = {
        "n": ctx.n,
        "i": i,
        "p_i": value,
        "closed_form": expected,
        "closed_form_match": value == expected,
        "roots": roots["roots"],
        "roots_in_bad_set": roots["all_in_bad_set"],
        "root_error": roots["error"],
    }
    # root containment in the bad set is only claimed for i <= n-1
    report["bad_set_required"] = i <= ctx.n - 1
    report["ok"] = report["closed_form_match"] and (report["roots_in_bad_set"] or not report["bad_set_required"])
    if not report["ok"]:
        logger.error(f"❌ P_{i} check failed for n={ctx.n}")
    return report


def evaluate_at_roots_of_unity(
    ctx: RingContext, i: int, consts: SkeinConstants | None = None, value: LaurentScalar | None = None
) -> dict:
    """P_i at q^(1/n) = 1 and -1, against (-1)^(i-1) (+-1)^((1-n)(i-1)) (i-1)!."""
    value = value if value is not None else p_i(ctx, i, consts)
    out = {}
    for x in (1, -1):
        got = eval_numeric(value, w_half_for_q_root(ctx, x))
        expected = (-1) ** (i - 1) * x ** abs((1 - ctx.n) * (i - 1)) * int(sp.factorial(i - 1))
        out[x] = {"value": got, "expected": int(expected), "ok": abs(got - int(expected)) < 1e-9}
    return out


# ==============================================================================
# RANDOMIZED CHECKS
# ==============================================================================
def random_braid(rng: random.Random, strands: int, max_letters: int) -> BraidWord:
    if strands < 2:
        return BraidWord(strands)
    length = rng.randint(0, max_letters)
    return BraidWord(strands, tuple((rng.randint(1, strands - 1), rng.choice((1, -1))) for _ in range(length)))


def cycle_type(braid: BraidWord) -> Monomial:
    return tuple(sorted(len(c) for c in simulate(braid).components))


def check_confluence(ctx: RingContext, consts: SkeinConstants, braids: Iterable[BraidWord]) -> list[BraidWord]:
    """Braids whose leftmost and rightmost reductions disagree."""
    left = BraidReducer(ctx, consts, "leftmost")
    right = BraidReducer(ctx, consts, "rightmost")
    failures = [b for b in braids if left.reduce(b) != right.reduce(b)]
    for b in failures:
        logger.error(f"❌ Reduction depends on resolution order for {b}")
    return failures


def check_classical_limit(ctx: RingContext, consts: SkeinConstants, braids: Iterable[BraidWord], tol: float = 1e-9) -> list[BraidWord]:
    """Braids whose reduction at q^(1/n) = 1 is not the bare cycle-type monomial."""
    w = w_half_for_q_root(ctx, 1)
    reducer = BraidReducer(ctx, consts)
    failures = []
    for b in braids:
        values = reducer.reduce(b).specialize(w)
        target = cycle_type(b)
        ok = all(abs(v - (1 if k == target else 0)) < tol for k, v in values.items()) and target in values
        if not ok:
            failures.append(b)
    return failures
