"""Exact Laurent polynomials in the formal variable w_half = omega^(1/2).

Every scalar the annulus computations need lives in Z[w_half, w_half^-1]:

    q^(1/n) = w_half^(2n)        q = w_half^(2n^2)        omega = w_half^2

so a single integer exponent unit covers all of them.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
import sympy as sp


@dataclass(frozen=True)
class RingContext:
    """Fixes n, and with it the exponent bookkeeping between q and w_half."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"RingContext needs an integer n >= 2, got {self.n!r}")

    @property
    def q_root_unit(self) -> int:
        """w_half exponent of q^(1/n)."""
        return 2 * self.n

    @property
    def q_unit(self) -> int:
        """w_half exponent of q."""
        return 2 * self.n * self.n

    def q_root(self, k: int = 1) -> "LaurentScalar":
        return LaurentScalar.monomial(k * self.q_root_unit)

    def q(self, k: int = 1) -> "LaurentScalar":
        return LaurentScalar.monomial(k * self.q_unit)

    def omega(self, k: int = 1) -> "LaurentScalar":
        return LaurentScalar.monomial(2 * k)

    def check_same(self, other: "RingContext"):
        if self != other:
            raise ValueError(f"ring context mismatch: n={self.n} vs n={other.n}")


class LaurentScalar:
    """Immutable sparse Laurent polynomial {exponent: integer coefficient}."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, int] = {}
        for e, c in items:
            if c:
                acc[int(e)] = acc.get(int(e), 0) + int(c)
        self._terms = tuple(sorted((e, c) for e, c in acc.items() if c))
        self._hash = None

    # ---- constructors ----
    @classmethod
    def zero(cls) -> "LaurentScalar":
        return cls()

    @classmethod
    def one(cls) -> "LaurentScalar":
        return cls(((0, 1),))

    @classmethod
    def monomial(cls, exponent: int, coeff: int = 1) -> "LaurentScalar":
        return cls(((exponent, coeff),))

    @classmethod
    def coerce(cls, value) -> "LaurentScalar":
        if isinstance(value, LaurentScalar):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(((0, int(value)),))
        raise TypeError(f"cannot use {type(value).__name__} as a LaurentScalar")

    # ---- inspection ----
    @property
    def terms(self) -> tuple[tuple[int, int], ...]:
        return self._terms

    def as_dict(self) -> dict[int, int]:
        return dict(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    @property
    def is_unit(self) -> bool:
        return len(self._terms) == 1 and abs(self._terms[0][1]) == 1

    @property
    def min_exponent(self) -> int:
        if not self._terms:
            raise ValueError("zero scalar has no exponents")
        return self._terms[0][0]

    @property
    def max_exponent(self) -> int:
        if not self._terms:
            raise ValueError("zero scalar has no exponents")
        return self._terms[-1][0]

    # ---- arithmetic ----
    def __add__(self, other) -> "LaurentScalar":
        other = LaurentScalar.coerce(other)
        acc = dict(self._terms)
        for e, c in other._terms:
            acc[e] = acc.get(e, 0) + c
        return LaurentScalar(acc)

    __radd__ = __add__

    def __neg__(self) -> "LaurentScalar":
        return LaurentScalar((e, -c) for e, c in self._terms)

    def __sub__(self, other) -> "LaurentScalar":
        return self + (-LaurentScalar.coerce(other))

    def __rsub__(self, other) -> "LaurentScalar":
        return LaurentScalar.coerce(other) - self

    def __mul__(self, other) -> "LaurentScalar":
        if isinstance(other, (int, np.integer)):
            return LaurentScalar((e, c * int(other)) for e, c in self._terms)
        if not isinstance(other, LaurentScalar):
            return NotImplemented
        acc: dict[int, int] = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return LaurentScalar(acc)

    __rmul__ = __mul__

    def shift(self, exponent: int) -> "LaurentScalar":
        """Multiply by w_half^exponent."""
        return LaurentScalar((e + exponent, c) for e, c in self._terms)

    def inverse(self) -> "LaurentScalar":
        if not self.is_unit:
            raise ValueError(f"division by non-unit {self!r}")
        e, c = self._terms[0]
        return LaurentScalar.monomial(-e, c)

    def __truediv__(self, other) -> "LaurentScalar":
        return self * LaurentScalar.coerce(other).inverse()

    def __pow__(self, k: int) -> "LaurentScalar":
        if k < 0:
            return self.inverse() ** (-k)
        if self.is_monomial:
            e, c = self._terms[0]
            return LaurentScalar.monomial(e * k, c**k)
        result, base = LaurentScalar.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def unit_ratio(self, other: "LaurentScalar") -> "LaurentScalar | None":
        """The unit u = +-w_half^e with self == u * other, if there is one."""
        other = LaurentScalar.coerce(other)
        if self.is_zero or other.is_zero or len(self._terms) != len(other._terms):
            return None
        e0 = self._terms[0][0] - other._terms[0][0]
        c_self, c_other = self._terms[0][1], other._terms[0][1]
        if abs(c_self) != abs(c_other):
            return None
        u = LaurentScalar.monomial(e0, 1 if c_self == c_other else -1)
        return u if u * other == self else None

    # ---- comparisons ----
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, np.integer)):
            other = LaurentScalar.coerce(other)
        if not isinstance(other, LaurentScalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = [f"{c}*w^{e}" if e else f"{c}" for e, c in self._terms]
        return " + ".join(parts).replace("+ -", "- ")

    # ---- numeric ----
    def evaluate(self, w_half: complex) -> complex:
        return eval_numeric(self, w_half)


# ==============================================================================
# QUANTUM INTEGERS
# ==============================================================================
def qint(ctx: RingContext, m: int) -> LaurentScalar:
    """[m] = sum_{i=1..m} q^(-m-1+2i); [0] = 0."""
    if m < 0:
        raise ValueError(f"quantum integer needs m >= 0, got {m}")
    return LaurentScalar({(-m - 1 + 2 * i) * ctx.q_unit: 1 for i in range(1, m + 1)})


def qfact(ctx: RingContext, m: int) -> LaurentScalar:
    if m < 0:
        raise ValueError(f"quantum factorial needs m >= 0, got {m}")
    result = LaurentScalar.one()
    for i in range(1, m + 1):
        result = result * qint(ctx, i)
    return result


def q_pow(ctx: RingContext, r) -> LaurentScalar:
    """q^r for a rational r; the w_half exponent 2n^2 r must be an integer."""
    exponent = sp.Rational(r) * ctx.q_unit
    if exponent.q != 1:
        raise ValueError(f"q^{r} is not a power of w_half for n={ctx.n}")
    return LaurentScalar.monomial(int(exponent.p))


# ==============================================================================
# NUMERIC EVALUATION
# ==============================================================================
def eval_numeric(s: LaurentScalar, w_half: complex) -> complex:
    if w_half == 0:
        raise ValueError("cannot evaluate a Laurent polynomial at w_half = 0")
    if s.is_zero:
        return 0j
    exps = np.array([e for e, _ in s.terms], dtype=np.int64)
    coeffs = np.array([float(c) for _, c in s.terms], dtype=np.complex128)
    return complex(np.sum(coeffs * np.power(complex(w_half), exps)))


def w_half_for_q(ctx: RingContext, q: complex) -> complex:
    """A w_half whose q = w_half^(2n^2) equals the given value."""
    if q == 0:
        raise ValueError("q must be nonzero")
    return cmath.exp(cmath.log(complex(q)) / ctx.q_unit)


def w_half_for_q_root(ctx: RingContext, x: complex) -> complex:
    """A w_half whose q^(1/n) = w_half^(2n) equals the given value."""
    if x == 0:
        raise ValueError("q^(1/n) must be nonzero")
    return cmath.exp(cmath.log(complex(x)) / ctx.q_root_unit)


def in_bad_set(q: complex, n: int, tol: float = 1e-9) -> bool:
    """q on the unit circle, a (2m)-th root of unity for some 2 <= m <= n-1, and not +-1."""
    if q == 0:
        raise ValueError("q must be nonzero")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    q = complex(q)
    if abs(abs(q) - 1) >= tol:
        return False
    if abs(q - 1) < tol or abs(q + 1) < tol:
        return False
    return any(abs(q ** (2 * m) - 1) < tol for m in range(2, n))


# ==============================================================================
# EXPRESSION PARSING (constants tables)
# ==============================================================================
N_SYMBOL, X_SYMBOL = sp.symbols("n x")


def scalar_from_expression(ctx: RingContext, text: str) -> LaurentScalar:
    """Parse a sympy expression in n and x = q^(1/n) into an exact scalar."""
    try:
        expr = sp.sympify(text, locals={"n": N_SYMBOL, "x": X_SYMBOL})
    except (sp.SympifyError, TypeError) as e:
        raise ValueError(f"cannot parse constant expression {text!r}: {e}") from e
    expr = sp.cancel(sp.expand(expr.subs(N_SYMBOL, ctx.n)))
    if expr.free_symbols - {X_SYMBOL}:
        raise ValueError(f"unexpected symbols in {text!r}: {expr.free_symbols}")
    num, den = sp.fraction(sp.together(expr))
    num_poly = sp.Poly(sp.expand(num), X_SYMBOL)
    den_poly = sp.Poly(sp.expand(den), X_SYMBOL)
    if len(den_poly.terms()) != 1:
        raise ValueError(f"{text!r} does not reduce to a Laurent polynomial in x")
    (den_deg,), den_coeff = den_poly.terms()[0]
    if abs(den_coeff) != 1:
        raise ValueError(f"{text!r} has a non-unit denominator {den_coeff}")
    sign = 1 if den_coeff > 0 else -1
    terms = {}
    for (deg,), coeff in num_poly.terms():
        if not coeff.is_integer:
            raise ValueError(f"{text!r} has a non-integral coefficient {coeff}")
        terms[(deg - den_deg) * ctx.q_root_unit] = sign * int(coeff)
    return LaurentScalar(terms)


def scalar_from_sympy_q(ctx: RingContext, poly: sp.Expr, q_symbol: sp.Symbol) -> LaurentScalar:
    """Convert an integer polynomial in q (sympy) to a LaurentScalar."""
    p = sp.Poly(sp.expand(poly), q_symbol)
    return LaurentScalar({deg * ctx.q_unit: int(c) for (deg,), c in p.terms()})
