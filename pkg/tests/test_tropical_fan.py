import pytest
import sympy as sp

from src.algebra.fg_matrices import diagonal_degree_formula
from src.algebra.quantum_torus import build_triangle
from src.logic.tropical_fan import (
    AnnulusFanPoint,
    TriangleFunction,
    annulus_fan_points,
    combination,
    decompose,
    fan_membership,
    glued_pairs,
    hilbert_basis,
    level_function,
    banded_t_inverse,
    rhombus,
    satisfies_gluing,
    t_matrix,
    tropical_t,
    verify_t_inverse,
)


def _levels(f):
    return [f.level_values()[a - 1] for a in range(1, f.n)]


def test_tropical_values_n3():
    assert _levels(tropical_t(3, 1, "R")) == [2, 1]
    assert _levels(tropical_t(3, 2, "R")) == [1, 2]


def test_tropical_values_n4():
    assert _levels(tropical_t(4, 1, "R")) == [3, 2, 1]


def test_zero_on_a_equals_zero():
    f = tropical_t(4, 2, "L")
    assert all(f[(0, b, 4 - b)] == 0 for b in range(5))


@pytest.mark.parametrize("n", range(2, 7))
def test_left_right_symmetry(n):
    for k in range(1, n):
        assert tropical_t(n, n - k, "L") == tropical_t(n, k, "R")


def test_tropical_t_range():
    with pytest.raises(ValueError):
        tropical_t(3, 3, "R")
    with pytest.raises(ValueError):
        tropical_t(3, 1, "X")


def test_corners_read_zero_and_lattice_checked():
    f = tropical_t(3, 1, "R")
    assert f[(3, 0, 0)] == 0
    with pytest.raises(ValueError):
        f[(1, 1, 0)]


@pytest.mark.parametrize("n", range(2, 7))
def test_rhombus_numbers_of_tropical_functions(n):
    for k in range(1, n):
        r = rhombus(tropical_t(n, k, "R"))
        assert all(v == (1 if i == k else 0) for (i, _), v in r.bottom_left.items())
        assert all(v == 0 for v in r.top.values())
        assert all(v == 0 for v in r.bottom_right.values())
        assert fan_membership(tropical_t(n, k, "R")) == "cone_C"


def test_rhombus_index_ranges():
    r = rhombus(TriangleFunction(4, {}))
    expected = {(i, j) for i in range(1, 4) for j in range(1, 5 - i)}
    assert set(r.top) == set(r.bottom_left) == set(r.bottom_right) == expected
    assert all(v == 0 for v in r.all_values())


def test_rhombus_additive(rng):
    tri = build_triangle(4)
    f = TriangleFunction(4, {v: rng.randint(-5, 5) for v in tri.vertices})
    g = TriangleFunction(4, {v: rng.randint(-5, 5) for v in tri.vertices})
    rf, rg, rs = rhombus(f), rhombus(g), rhombus(f + g)
    assert all(rs.top[key] == rf.top[key] + rg.top[key] for key in rs.top)
    assert all(rs.bottom_left[key] == rf.bottom_left[key] + rg.bottom_left[key] for key in rs.bottom_left)


def test_membership_classes():
    n = 3
    tri = build_triangle(n)
    constant = TriangleFunction(n, {v: n for v in tri.vertices})
    assert fan_membership(constant) == "fan"
    assert fan_membership(TriangleFunction(n, {(1, 1, 1): sp.Rational(1, 2)})) == "none"
    assert fan_membership(tropical_t(3, 1, "R").scaled(-1)) == "lattice"


def test_decompose_recovers_coefficients():
    f = combination(4, (2, 0, 3))
    assert decompose(f) == [2, 0, 3]


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_hilbert_basis(n):
    report = hilbert_basis(n, n * n)
    assert set(report.basis) == {tropical_t(n, k, "R") for k in range(1, n)}
    assert report.decomposition_ok
    assert report.certified


def test_hilbert_basis_uncertified_bound():
    report = hilbert_basis(3, 2)
    assert not report.certified


def test_hilbert_bound_validated():
    with pytest.raises(ValueError):
        hilbert_basis(3, 0)


def test_t_matrix_n3():
    assert t_matrix(3) == sp.Matrix([[1, 2], [2, 1]])
    assert banded_t_inverse(3) == sp.Matrix([[-1, 2], [2, -1]]) / 3


@pytest.mark.parametrize("n", range(2, 7))
def test_t_inverse(n):
    assert verify_t_inverse(n)


def test_annulus_points_n3():
    points = annulus_fan_points(3, 2)
    assert len(points) == 6
    assert len({(p.left, p.right) for p in points}) == 6
    zero = next(p for p in points if p.multiplicities == (0, 0))
    assert zero.left == TriangleFunction(3, {}) and zero.right == TriangleFunction(3, {})


@pytest.mark.parametrize("n", range(2, 7))
def test_tropical_pairs_glue(n):
    for k in range(1, n):
        assert satisfies_gluing(AnnulusFanPoint(tropical_t(n, k, "L"), tropical_t(n, k, "R")))


def test_glued_pairs_are_tropical_combinations():
    pairs = glued_pairs(3, 6)
    assert (TriangleFunction(3, {}), TriangleFunction(3, {})) in pairs
    assert (tropical_t(3, 1, "L"), tropical_t(3, 1, "R")) in pairs


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_diagonal_formula_matches_tropical_sums(n):
    tri = build_triangle(n)
    for k in range(1, n):
        t = tropical_t(n, k, "R")
        for v in tri.vertices:
            assert sum(diagonal_degree_formula(n, i, v) for i in range(n + 1 - k, n + 1)) == t[v]


def test_level_function_length():
    with pytest.raises(ValueError):
        level_function(4, [1, 2])
