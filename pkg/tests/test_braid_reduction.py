import pytest

from config import settings
from src.algebra.scalars import LaurentScalar, RingContext, q_pow
from src.logic.braid_reduction import (
    BraidReducer,
    BraidWord,
    GammaPolynomial,
    SkeinConstants,
    basis_web_prefactor,
    check_classical_limit,
    check_confluence,
    check_skein_consistency,
    close_and_reduce,
    closed_form_divisors,
    cycle_type,
    evaluate_at_roots_of_unity,
    free_reduce,
    p_closed_form,
    p_i,
    positive_lift,
    random_braid,
    restrict,
    simulate,
    verify_p_closed_form,
)


def test_parse():
    assert BraidWord.parse(3, "1 -2 1").word == ((1, 1), (2, -1), (1, 1))
    assert BraidWord.parse(3, "1,2").word == ((1, 1), (2, 1))
    assert BraidWord.parse(3, "").word == ()
    assert BraidWord.parse(3, "1 1 -2").writhe == 1


@pytest.mark.parametrize("strands,text", [(3, "0"), (3, "a"), (2, "2"), (3, "-3")])
def test_parse_rejects(strands, text):
    with pytest.raises(ValueError):
        BraidWord.parse(strands, text)


def test_braid_needs_a_strand():
    with pytest.raises(ValueError):
        BraidWord(0)


def test_free_reduce():
    assert free_reduce([(1, 1), (1, -1), (2, 1)]) == ((2, 1),)
    assert free_reduce([(1, 1), (2, 1), (2, -1), (1, -1)]) == ()
    assert free_reduce([(1, 1), (1, 1)]) == ((1, 1), (1, 1))


def test_simulate_components():
    state = simulate(BraidWord(3, ((1, 1),)))
    assert state.components == ((0, 1), (2,))
    assert not state.is_knot
    assert simulate(BraidWord(3, ((1, 1), (2, 1)))).is_knot
    assert cycle_type(BraidWord(3, ((1, 1),))) == (1, 2)


def test_restrict_keeps_own_crossings():
    state = simulate(BraidWord.parse(3, "1 1 1"))
    assert restrict(state, (0, 1)) == BraidWord.parse(2, "1 1 1")
    assert restrict(state, (2,)) == BraidWord(1)


def test_identity_closure(ring3, skein3):
    result = close_and_reduce(ring3, BraidWord(2), skein3)
    assert result == GammaPolynomial({(1, 1): LaurentScalar.one()})


def test_gamma_2(ring3, skein3):
    result = close_and_reduce(ring3, BraidWord.parse(2, "1"), skein3)
    assert result == GammaPolynomial.gamma(2)


def test_negative_crossing_switches(ring3, skein3):
    result = close_and_reduce(ring3, BraidWord.parse(2, "-1"), skein3)
    flip = -(skein3.alpha_plus / skein3.alpha_minus)
    smooth = skein3.alpha_zero / skein3.alpha_minus
    assert result == GammaPolynomial({(2,): flip, (1, 1): smooth})


def test_winding_is_conserved(ring3, skein3, rng):
    reducer = BraidReducer(ring3, skein3)
    for _ in range(30):
        braid = random_braid(rng, rng.randint(1, 4), 6)
        for key in reducer.reduce(braid).terms:
            assert sum(key) == braid.strands


def test_reducer_rejects_unknown_strategy(ring3, skein3):
    with pytest.raises(ValueError):
        BraidReducer(ring3, skein3, "middle")


def test_confluence(ring3, skein3, rng):
    braids = [
        random_braid(rng, rng.randint(2, 4), settings.CONFLUENCE_MAX_LETTERS)
        for _ in range(settings.CONFLUENCE_BRAIDS)
    ]
    assert check_confluence(ring3, skein3, braids) == []


def test_classical_limit(ring3, skein3, rng):
    braids = [random_braid(rng, rng.randint(1, 4), 6) for _ in range(40)]
    assert check_classical_limit(ring3, skein3, braids) == []


def test_skein_consistency():
    for n in (2, 3, 4, 5):
        ctx = RingContext(n)
        assert check_skein_consistency(ctx, SkeinConstants.default(ctx))


def test_skein_constants_must_be_units(ring3, skein3):
    with pytest.raises(ValueError):
        SkeinConstants(
            alpha_plus=ring3.q(1) + ring3.q(-1),
            alpha_minus=skein3.alpha_minus,
            alpha_zero=skein3.alpha_zero,
            kink=skein3.kink,
            unknot=skein3.unknot,
        )


def test_positive_lift():
    assert positive_lift((0, 1, 2)) == BraidWord(3)
    assert len(positive_lift((2, 1, 0)).word) == 3
    assert len(positive_lift((1, 0, 2)).word) == 1
    assert all(s == 1 for _, s in positive_lift((2, 0, 3, 1)).word)
    with pytest.raises(ValueError):
        positive_lift((0, 0, 1))


def test_p1_is_one(ring3):
    assert p_i(ring3, 1) == LaurentScalar.one()


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_p2(n):
    ctx = RingContext(n)
    # -q^(-1 + 1/n)
    assert p_i(ctx, 2) == -(q_pow(ctx, -1) * ctx.q_root(1))


def test_p_i_rejects_zero(ring3):
    with pytest.raises(ValueError):
        p_i(ring3, 0)


def test_closed_form_divisors():
    assert closed_form_divisors(2) == []
    assert closed_form_divisors(3) == [4]
    assert closed_form_divisors(4) == [3, 4, 6]


@pytest.mark.parametrize("n,i", [(3, 1), (3, 2), (3, 3), (4, 3), (5, 3), (5, 4)])
def test_p_closed_form(n, i):
    ctx = RingContext(n)
    report = verify_p_closed_form(ctx, i)
    assert report["closed_form_match"]
    assert report["roots_in_bad_set"]
    assert report["ok"]


def test_p3_by_hand():
    ctx = RingContext(3)
    # q^(-4 + 2/n) (q^2 + 1)
    expected = q_pow(ctx, -4) * ctx.q_root(2) * (ctx.q(2) + LaurentScalar.one())
    assert p_closed_form(ctx, 3) == expected
    assert p_i(ctx, 3) == expected


def test_closed_form_range(ring3):
    with pytest.raises(ValueError):
        verify_p_closed_form(ring3, 5)


@pytest.mark.parametrize("n,i", [(3, 2), (3, 3), (4, 3)])
def test_evaluate_at_roots_of_unity(n, i):
    result = evaluate_at_roots_of_unity(RingContext(n), i)
    assert set(result) == {1, -1}
    assert all(v["ok"] for v in result.values())
    assert result[1]["expected"] == (-1) ** (i - 1) * (1 if i < 3 else 2)


def test_basis_web_prefactor(ring3):
    assert basis_web_prefactor(ring3, 3) == ring3.q(6)
    # q^6 * q^-2 [1]
    assert basis_web_prefactor(ring3, 2) == ring3.q(4)


def test_gamma_polynomial_algebra():
    g = GammaPolynomial.gamma(2) + GammaPolynomial.gamma(1)
    sq = g * g
    assert sq.coefficient((1, 2)) == LaurentScalar.coerce(2)
    assert sq.coefficient((2, 1)) == LaurentScalar.coerce(2)
    assert sq.coefficient((3,)) == LaurentScalar.zero()
    assert GammaPolynomial.one() * g == g
    with pytest.raises(ValueError):
        GammaPolynomial({(0,): LaurentScalar.one()})


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_p5_at_roots_of_unity(n):
    result = evaluate_at_roots_of_unity(RingContext(n), 5)
    assert result[1]["expected"] == 24
    assert all(v["ok"] for v in result.values())


@pytest.mark.parametrize("n,i", [(2, 4), (3, 4), (4, 5), (5, 5)])
def test_evaluate_at_roots_of_unity_past_rank(n, i):
    result = evaluate_at_roots_of_unity(RingContext(n), i)
    assert result[1]["expected"] == (-1) ** (i - 1) * (1, 1, 2, 6, 24)[i - 1]
    assert all(v["ok"] for v in result.values())


def test_closed_form_past_rank_skips_bad_set():
    report = verify_p_closed_form(RingContext(2), 3)
    assert report["closed_form_match"]
    assert report["bad_set_required"] is False
    assert report["ok"] is True


def test_closed_form_within_rank_requires_bad_set():
    report = verify_p_closed_form(RingContext(4), 3)
    assert report["bad_set_required"] is True
    assert report["roots_in_bad_set"]
    assert report["ok"]
