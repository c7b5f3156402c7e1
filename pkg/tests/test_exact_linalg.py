"""Integer linear algebra: frozen oracle values and structural properties."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricforms.exact_linalg import (
    FGAbelianGroup,
    IntMatrix,
    MembershipError,
    basis_mod,
    cokernel_presentation,
    congruence_kernel_basis,
    det,
    image_basis,
    integer_matrix_from_fractions,
    kernel_basis,
    lattice_intersection,
    lattice_subquotient,
    rational_inverse,
    rational_solve,
    saturation_basis,
    smith_normal_form,
    solve_integer,
)

M = IntMatrix.from_rows


def test_matrix_basics():
    a = M([[1, 2], [3, 4]])
    assert a.shape == (2, 2)
    assert (a @ IntMatrix.identity(2)) == a
    assert a.transpose.rows == ((1, 3), (2, 4))
    assert (a - a).is_zero()
    assert a.apply((1, 1)) == (3, 7)
    assert a.col(1) == (2, 4)
    b = IntMatrix.from_cols([(1, 3), (2, 4)])
    assert b == a
    assert a.power(0) == IntMatrix.identity(2)
    assert a.power(2) == a @ a


def test_empty_shapes_are_tracked():
    e = IntMatrix.from_cols([], nrows=3)
    assert e.shape == (3, 0)
    assert e.transpose.shape == (0, 3)
    # equality must not depend on how the ncols hint was supplied
    assert M([[1, 2]]) == IntMatrix(((1, 2),), 2)


def test_det_frozen_values():
    assert det(M([[1, 2], [3, 4]])) == -2
    assert det(IntMatrix.identity(3)) == 1
    assert det(M([[2, 0], [0, 3]])) == 6
    assert det(M([[1, 1], [1, 1]])) == 0
    assert det(IntMatrix.from_rows([], ncols=0)) == 1


# --- Smith normal form ------------------------------------------------------
# The first two decompositions were worked by hand with the pinned pivot rule
# (smallest absolute value, lowest row then column on ties) and frozen here so
# any drift in the rule is caught, not just wrong diagonals.


def test_snf_frozen_full_decomposition():
    dec = smith_normal_form(M([[2, 4], [6, 8]]))
    assert dec.d == M([[2, 0], [0, 4]])
    assert dec.u == M([[1, 0], [3, -1]])
    assert dec.v == M([[1, -2], [0, 1]])


def test_snf_frozen_tiebreak():
    # two entries of absolute value 1: (0,1) must win over (1,0)
    dec = smith_normal_form(M([[3, 1], [1, 3]]))
    assert dec.d == M([[1, 0], [0, 8]])
    assert dec.u == M([[1, 0], [3, -1]])
    assert dec.v == M([[0, 1], [1, -3]])


def test_snf_frozen_diagonals():
    cases = [
        ([[2, 0], [0, 3]], (1, 6)),
        ([[2, 0], [0, 2]], (2, 2)),
        ([[0, 0], [0, 0]], (0, 0)),
        ([[2, 4, 6]], (2,)),
        ([[2], [4], [6]], (2,)),
        ([[1, 0], [0, 1]], (1, 1)),
    ]
    for rows, diag in cases:
        assert smith_normal_form(M(rows)).diagonal == diag


def _check_snf_contract(m: IntMatrix) -> None:
    dec = smith_normal_form(m)
    assert dec.u @ m @ dec.v == dec.d
    assert abs(det(dec.u)) == 1
    assert abs(det(dec.v)) == 1
    assert dec.u @ dec.u_inv == IntMatrix.identity(m.nrows)
    assert dec.v @ dec.v_inv == IntMatrix.identity(m.ncols)
    diag = dec.diagonal
    assert all(x >= 0 for x in diag)
    for x, y in zip(diag, diag[1:]):
        assert y % x == 0 if x else y == 0
    for i in range(dec.d.nrows):
        for j in range(dec.d.ncols):
            if i != j:
                assert dec.d.entry(i, j) == 0


def test_snf_against_sympy_oracle():
    import sympy
    from sympy.matrices.normalforms import smith_normal_form as sympy_snf

    cases = [
        [[2, 4, 4], [-6, 6, 12], [10, 4, 16]],
        [[1, 2, 3], [4, 5, 6], [7, 8, 9]],
        [[6, 10], [15, 4]],
        [[0, 2], [3, 0], [0, 0]],
        [[5]],
        [[12, 8, 6], [4, 2, 0]],
    ]
    for rows in cases:
        m = M(rows)
        _check_snf_contract(m)
        ours = [x for x in smith_normal_form(m).diagonal if x]
        theirs = sympy_snf(sympy.Matrix(rows))
        ref = sorted(abs(theirs[i, i]) for i in range(min(theirs.shape)) if theirs[i, i])
        assert sorted(ours) == ref


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 4),
    st.integers(1, 4),
    st.data(),
)
def test_snf_properties_random(nr, nc, data):
    rows = [
        [data.draw(st.integers(-30, 30)) for _ in range(nc)] for _ in range(nr)
    ]
    m = M(rows)
    _check_snf_contract(m)
    # deterministic: recomputation is bitwise identical
    first = smith_normal_form(m)
    second = smith_normal_form(m)
    assert (first.u, first.d, first.v) == (second.u, second.d, second.v)


# --- derived lattice operations --------------------------------------------


def test_cokernel_frozen():
    assert cokernel_presentation(M([[2, 0], [0, 3]])) == FGAbelianGroup.cyclic(6)
    assert cokernel_presentation(M([[1], [1], [1]])) == FGAbelianGroup.free(2)
    assert cokernel_presentation(M([[2, 0], [0, 0], [0, 0]])) == FGAbelianGroup(2, (2,))
    assert cokernel_presentation(IntMatrix.identity(4)) == FGAbelianGroup.trivial()


def test_kernel_is_saturated():
    k = kernel_basis(M([[2, 2]]))
    assert k.ncols == 1
    assert k.col(0) in ((1, -1), (-1, 1))
    k2 = kernel_basis(M([[1, 1, 1]]))
    assert k2.ncols == 2
    assert M([[1, 1, 1]]) @ k2 == IntMatrix.zero(1, 2)
    # saturation: the quotient Z^3 / ker has no torsion
    assert cokernel_presentation(k2) == FGAbelianGroup.free(1)


def test_image_and_saturation():
    m = M([[2, 0], [0, 4], [0, 0]])
    im = image_basis(m)
    assert im.ncols == 2
    assert lattice_subquotient(im, m) == FGAbelianGroup.trivial()
    sat = saturation_basis(m)
    assert lattice_subquotient(sat, im) == FGAbelianGroup.from_factors([2, 4])


def test_solve_integer():
    a = M([[2, 0], [0, 3]])
    assert solve_integer(a, (4, 9)) == (2, 3)
    assert solve_integer(a, (1, 1)) is None
    x = solve_integer(M([[1, 1]]), (5,))
    assert x is not None and sum(x) == 5
    assert solve_integer(M([[2], [3]]), (2, 3)) == (1,)
    assert solve_integer(M([[2], [3]]), (2, 2)) is None


def test_lattice_subquotient_frozen():
    i2 = IntMatrix.identity(2)
    assert lattice_subquotient(i2, M([[2, 0], [0, 3]])) == FGAbelianGroup.cyclic(6)
    assert lattice_subquotient(i2, IntMatrix.from_cols([(1, 0)])) == FGAbelianGroup.free(1)
    assert lattice_subquotient(i2, IntMatrix.from_cols([], nrows=2)) == FGAbelianGroup.free(2)
    with pytest.raises(MembershipError):
        lattice_subquotient(i2.scaled(2), IntMatrix.from_cols([(1, 0)]))


def test_lattice_intersection_frozen():
    a = IntMatrix.from_cols([(2, 0), (0, 1)])
    b = IntMatrix.from_cols([(3, 0), (0, 1)])
    meet = lattice_intersection(a, b)
    want = IntMatrix.from_cols([(6, 0), (0, 1)])
    assert lattice_subquotient(meet, want) == FGAbelianGroup.trivial()
    assert lattice_subquotient(want, meet) == FGAbelianGroup.trivial()


def test_congruence_kernel():
    basis = congruence_kernel_basis(M([[1, 1]]), 2)
    assert basis.shape == (2, 2)
    assert abs(det(basis)) == 2
    for j in range(2):
        assert sum(basis.col(j)) % 2 == 0


def test_basis_mod_frozen():
    b = basis_mod(IntMatrix.from_cols([(2, 0), (0, 2)]), 4)
    assert b == M([[2, 0], [0, 2]])
    # no generators: the lattice is modulus * Z^n itself
    assert basis_mod(IntMatrix.from_cols([], nrows=3), 6) == IntMatrix.diagonal([6, 6, 6])
    # a unimodular generator set collapses to the identity
    assert basis_mod(M([[1, 7], [0, 1]]), 12) == IntMatrix.identity(2)


def _lattices_equal(a: IntMatrix, b: IntMatrix) -> bool:
    return (
        lattice_subquotient(a, b) == FGAbelianGroup.trivial()
        and lattice_subquotient(b, a) == FGAbelianGroup.trivial()
    )


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 4),
    st.integers(0, 5),
    st.sampled_from([1, 2, 3, 4, 6, 12, 63]),
    st.data(),
)
def test_basis_mod_matches_unbounded_route(nrows, ncols, modulus, data):
    entries = st.integers(-9, 9)
    cols = [
        [data.draw(entries) for _ in range(nrows)] for _ in range(ncols)
    ]
    gens = IntMatrix.from_cols(cols, nrows=nrows)
    b = basis_mod(gens, modulus)
    assert b.shape == (nrows, nrows)
    for i in range(nrows):
        assert 1 <= b.rows[i][i] <= modulus and modulus % b.rows[i][i] == 0
        for j in range(nrows):
            if j > i:
                assert b.rows[i][j] == 0
            elif j < i:
                assert 0 <= b.rows[i][j] < modulus
    slack = gens.hstack(IntMatrix.diagonal([modulus] * nrows))
    assert _lattices_equal(b, image_basis(slack))


def test_congruence_kernel_entries_bounded():
    m = M([[3, 1, 4, 1], [5, 9, 2, 6]])
    basis = congruence_kernel_basis(m, 63)
    assert all(0 <= x <= 63 for row in basis.rows for x in row)
    for j in range(basis.ncols):
        col = basis.col(j)
        assert all(sum(m.rows[i][k] * col[k] for k in range(4)) % 63 == 0 for i in range(2))


# --- abelian group canonical form ------------------------------------------


def test_fg_abelian_group_canonicalization():
    assert FGAbelianGroup.from_factors([2, 3]) == FGAbelianGroup(0, (6,))
    assert FGAbelianGroup.from_factors([4, 6]) == FGAbelianGroup(0, (2, 12))
    assert FGAbelianGroup.from_factors([2, 2]) == FGAbelianGroup(0, (2, 2))
    assert FGAbelianGroup.from_factors([0, 2]) == FGAbelianGroup(1, (2,))
    assert FGAbelianGroup.from_factors([1, 1]) == FGAbelianGroup.trivial()
    assert FGAbelianGroup.cyclic(1).is_trivial()


def test_fg_abelian_group_queries():
    g = FGAbelianGroup(0, (2, 4))
    assert g.order() == 8
    assert g.exponent() == 4
    assert FGAbelianGroup.free(1).order() is None
    assert str(g) == "Z/2 + Z/4"
    assert str(FGAbelianGroup.trivial()) == "1"
    assert g.direct_sum(FGAbelianGroup.cyclic(3)) == FGAbelianGroup(0, (2, 12))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 12), max_size=5), st.lists(st.integers(0, 12), max_size=5))
def test_direct_sum_matches_factor_concatenation(xs, ys):
    xs = [x for x in xs if x != 1]
    ys = [y for y in ys if y != 1]
    a = FGAbelianGroup.from_factors(xs)
    b = FGAbelianGroup.from_factors(ys)
    assert a.direct_sum(b) == FGAbelianGroup.from_factors(xs + ys)


# --- rational helpers -------------------------------------------------------


def test_rational_solve_and_inverse():
    a = M([[2, 1], [1, 1]])
    inv = rational_inverse(a)
    assert inv == [[Fraction(1), Fraction(-1)], [Fraction(-1), Fraction(2)]]
    x = rational_solve(M([[2, 0], [0, 4]]), IntMatrix.from_cols([(1, 2)]))
    assert x == [[Fraction(1, 2)], [Fraction(1, 2)]]
    assert rational_solve(M([[1, 1], [1, 1]]), IntMatrix.from_cols([(0, 1)])) is None
    assert integer_matrix_from_fractions([[Fraction(2), Fraction(1)]]) == M([[2, 1]])
    assert integer_matrix_from_fractions([[Fraction(1, 2)]]) is None
