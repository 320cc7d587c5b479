import cmath

import pytest
import sympy as sp

from src.algebra.scalars import (
    LaurentScalar,
    RingContext,
    eval_numeric,
    in_bad_set,
    q_pow,
    qfact,
    qint,
    scalar_from_expression,
    w_half_for_q,
    w_half_for_q_root,
)


def test_exponent_units():
    ctx = RingContext(3)
    assert ctx.q_root_unit == 6
    assert ctx.q_unit == 18
    assert ctx.q_root(3) == ctx.q(1)
    assert ctx.omega(9) == ctx.q(1)


def test_ring_context_rejects_small_n():
    with pytest.raises(ValueError):
        RingContext(1)


def test_ring_axioms(rng):
    def rand():
        return LaurentScalar({rng.randint(-5, 5): rng.randint(-3, 3) for _ in range(3)})

    for _ in range(200):
        a, b, c = rand(), rand(), rand()
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert (a - a).is_zero


def test_zero_coefficients_are_dropped():
    s = LaurentScalar({3: 2, 5: 0}) - LaurentScalar.monomial(3, 2)
    assert s.is_zero
    assert not s


def test_unit_inverse_and_division():
    u = LaurentScalar.monomial(7, -1)
    assert u * u.inverse() == 1
    assert (LaurentScalar.monomial(10, 3) / u) == LaurentScalar.monomial(3, -3)
    assert u ** -2 == LaurentScalar.monomial(-14)


def test_division_by_non_unit_raises():
    with pytest.raises(ValueError):
        LaurentScalar.one() / (LaurentScalar.one() + LaurentScalar.monomial(2))
    with pytest.raises(ValueError):
        LaurentScalar.monomial(2, 2).inverse()


def test_quantum_integers():
    ctx = RingContext(2)
    assert qint(ctx, 0).is_zero
    assert qint(ctx, 1) == 1
    assert qint(ctx, 2) == ctx.q(1) + ctx.q(-1)
    assert qfact(ctx, 3) == qint(ctx, 2) * qint(ctx, 3)


def test_q_pow_rational():
    ctx = RingContext(3)
    assert q_pow(ctx, sp.Rational(1, 3)) == ctx.q_root(1)
    assert q_pow(ctx, -2) == ctx.q(-2)
    with pytest.raises(ValueError):
        q_pow(ctx, sp.Rational(1, 5))


def test_unit_ratio():
    ctx = RingContext(2)
    a = qint(ctx, 3)
    assert (a * LaurentScalar.monomial(4, -1)).unit_ratio(a) == LaurentScalar.monomial(4, -1)
    assert (a + 1).unit_ratio(a) is None


def test_numeric_evaluation_at_classical_point():
    ctx = RingContext(4)
    w = w_half_for_q(ctx, 1)
    assert abs(eval_numeric(qint(ctx, 4), w) - 4) < 1e-12
    assert abs(eval_numeric(qfact(ctx, 3), w) - 6) < 1e-12


def test_q_root_specialization():
    ctx = RingContext(3)
    w = w_half_for_q_root(ctx, -1)
    assert abs(eval_numeric(ctx.q_root(1), w) + 1) < 1e-12
    assert abs(eval_numeric(ctx.q(1), w) + 1) < 1e-12


def test_bad_set():
    assert in_bad_set(1j, 3)
    assert not in_bad_set(1, 3)
    assert not in_bad_set(-1, 3)
    # a primitive 6th root needs m = 3 <= n - 1
    assert not in_bad_set(cmath.exp(1j * cmath.pi / 3), 3)
    assert in_bad_set(cmath.exp(1j * cmath.pi / 3), 4)
    assert not in_bad_set(2j, 4)


def test_scalar_from_expression():
    ctx = RingContext(3)
    assert scalar_from_expression(ctx, "x**n - x**(-n)") == ctx.q(1) - ctx.q(-1)
    assert scalar_from_expression(ctx, "-1/x") == LaurentScalar.monomial(-6, -1)
    assert scalar_from_expression(ctx, "(-1)**(n-1)*(x**(n**2) - x**(-n**2))/(x**n - x**(-n))") == qint(ctx, 3)


@pytest.mark.parametrize("text", ["1/(x+1)", "1/2", "x**2 + y", "x +* 2"])
def test_scalar_from_expression_rejects(text):
    with pytest.raises(ValueError):
        scalar_from_expression(RingContext(3), text)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_quantum_integer_vanishes_at_primitive_2m_roots(m):
    ctx = RingContext(3)
    for j in range(1, 2 * m):
        if sp.gcd(j, 2 * m) != 1:
            continue
        w = w_half_for_q(ctx, cmath.exp(1j * cmath.pi * j / m))
        assert abs(eval_numeric(qint(ctx, m), w)) < 1e-9
    # sin(m pi / (m + 1)) / sin(pi / (m + 1)) is nonzero
    w = w_half_for_q(ctx, cmath.exp(1j * cmath.pi / (m + 1)))
    assert abs(eval_numeric(qint(ctx, m), w)) > 1e-3
    assert abs(eval_numeric(qint(ctx, m), w_half_for_q(ctx, 1)) - m) < 1e-9


def test_quantum_factorial_vanishes_at_primitive_sixth_root():
    ctx = RingContext(3)
    w = w_half_for_q(ctx, cmath.exp(1j * cmath.pi / 3))
    assert abs(eval_numeric(qfact(ctx, 3), w)) < 1e-9
    assert abs(eval_numeric(qfact(ctx, 2), w)) > 1e-3
