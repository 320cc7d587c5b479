import pytest

from src.algebra.fg_matrices import (
    elem_edge,
    elem_left,
    elem_right,
    leading_diagonal,
    left_matrix,
    right_matrix,
    rotate_vertex,
    rotate_vertices,
    verify_diagonal_entries,
)
from src.algebra.quantum_torus import TorusElement, build_quiver, build_triangle
from src.algebra.scalars import LaurentScalar


def test_left_matrix_n2_exponents():
    L = left_matrix(2)
    assert set(L[1, 1].terms) == {(0, -1, -1)}
    assert set(L[2, 1].terms) == {(0, 1, -1)}
    assert set(L[2, 2].terms) == {(0, 1, 1)}
    assert L[1, 2].is_zero


@pytest.mark.parametrize("n", [2, 3, 4])
def test_triangularity(n):
    assert left_matrix(n).is_lower_triangular()
    assert right_matrix(n).is_upper_triangular()
    assert left_matrix(n).weyl


def test_rotated_right_matrix_is_left_transpose_n2():
    L, R = left_matrix(2), right_matrix(2).rotate(1)
    for i in range(1, 3):
        for j in range(1, 3):
            assert set(R[i, j].terms) == set(L[j, i].terms)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_diagonal_entries(n):
    report = verify_diagonal_entries(n)
    assert report["ok"], report["items"]
    assert set(report["items"]) == {"monomial", "commute", "dominance", "formula", "products"}


def test_leading_diagonal_n2():
    d, c = leading_diagonal(left_matrix(2), 2)
    assert d == (0, 1, 1)
    assert c.is_unit


def test_elementary_index_checks():
    with pytest.raises(ValueError):
        elem_edge(3, 0, (1, 0, 2))
    with pytest.raises(ValueError):
        elem_left(3, 3, (1, 1, 1))
    with pytest.raises(ValueError):
        elem_left(3, 2)
    with pytest.raises(ValueError):
        elem_right(3, 2)


def test_elem_left_first_is_unipotent():
    E = elem_left(3, 1)
    one = TorusElement.one(E.quiver)
    assert E[1, 1] == one and E[1, 2] == one and E[2, 1].is_zero


def test_rotation_has_order_three(rng):
    tri = build_triangle(3)
    quiver = build_quiver(tri)
    for _ in range(20):
        d = tuple(rng.randint(-2, 2) for _ in range(tri.size))
        e = TorusElement(quiver, {d: LaurentScalar.monomial(rng.randint(-3, 3))})
        assert rotate_vertices(rotate_vertices(rotate_vertices(e, 1), 1), 1) == e
        assert rotate_vertices(e, 3) == e
    assert rotate_vertex((1, 2, 0)) == (0, 1, 2)


def test_rotation_steps_validated():
    e = TorusElement.one(build_quiver(build_triangle(2)))
    with pytest.raises(ValueError):
        rotate_vertices(e, 4)


def test_matrix_index_validated():
    with pytest.raises(ValueError):
        left_matrix(2)[0, 1]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_elem_right_mirrors_elem_left_at_inverse(n):
    quiver = build_quiver(build_triangle(n))
    X = (1, 1, n - 2) if n > 2 else (1, 1, 0)
    for j in range(1, n):
        R = elem_right(n, j, X, quiver)
        L = elem_left(n, j, X, quiver)
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                mirrored = {tuple(-x for x in d): c for d, c in L[n + 1 - a, n + 1 - b].terms.items()}
                assert R[a, b].terms == mirrored, (j, a, b)


def test_elem_right_first_has_no_variable():
    E = elem_right(4, 1)
    one = TorusElement.one(E.quiver)
    assert E[4, 3] == one and E[3, 3] == one and E[1, 1] == one
    assert E[3, 4].is_zero
