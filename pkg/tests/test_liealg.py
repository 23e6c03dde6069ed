"""so(g) bases, centralizer computation, and the block decomposition."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holonomy import (
    build_canonical,
    centralizer_basis,
    centralizer_dim,
    m_ij_basis,
    make_pencil,
    member_coords,
    so_basis,
    wedge,
    wedge_tags,
)
from holonomy.exactla import RatMat, commutator, rank
from holonomy.liealg import SubspaceBasis, basis_to_json, export_m_ij, is_g_skew

from helpers import mat, pair_of, unit

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def test_wedge_antisymmetry_and_example():
    g = mat([[0, 1], [1, 0]])
    e0, e1 = unit(2, 0), unit(2, 1)
    assert wedge(e0, e0, g).is_zero()
    assert wedge(e0, e1, g) == mat([[1, 0], [0, -1]])
    assert wedge(e1, e0, g) == mat([[-1, 0], [0, 1]])


@given(rationals, rationals, rationals, rationals, rationals)
@settings(max_examples=40)
def test_wedge_bilinear(a, b, u0, u1, v0):
    g = mat([[1, 0], [0, -1]])
    u = [u0, u1]
    v = [v0, Fraction(2)]
    w = [a * x for x in u]
    lhs = wedge(w, v, g)
    rhs = a * wedge(u, v, g)
    assert lhs == rhs
    s = wedge([u0 + b * v0, u1 + b * Fraction(2)], v, g)
    assert s == wedge(u, v, g) + b * wedge(v, v, g)


def test_wedge_output_is_g_skew():
    pair = pair_of([(1, 1), (2, -1)])
    for x in so_basis(pair.g):
        assert is_g_skew(pair.g, x)


def test_so_basis_dimensions():
    assert len(so_basis(mat([[0, 1], [1, 0]]))) == 1
    pair = pair_of([(2, 1), (2, -1)])
    basis = so_basis(pair.g)
    assert len(basis) == 6
    for x in basis:
        assert is_g_skew(pair.g, x)


def test_so_basis_euclidean_spans_antisymmetric():
    basis = so_basis(RatMat.identity(3))
    assert len(basis) == 3
    for x in basis:
        assert x.transpose() == -x
    # the three elementary antisymmetric matrices are members
    for i, j in wedge_tags(3):
        target = RatMat.zeros(3, 3).vec()
        e = RatMat.zeros(3, 3).to_rows()
        e[i][j] = Fraction(1)
        e[j][i] = Fraction(-1)
        assert member_coords(mat(e), basis) is not None


def test_so_basis_rejects_degenerate():
    with pytest.raises(ValueError):
        so_basis(mat([[1, 0], [0, 0]]))


def test_centralizer_single_block_trivial():
    for size in (2, 3, 4):
        pair = pair_of([(size, 1)])
        assert len(centralizer_basis(pair)) == 0
        assert centralizer_dim(pair) == 0


def test_centralizer_blocks_1_2():
    pair = pair_of([(1, 1), (2, 1)])
    basis = centralizer_basis(pair)
    assert len(basis) == 1 == centralizer_dim(pair)
    z = mat([[0, 0, 1], [-1, 0, 0], [0, 0, 0]])
    coords = member_coords(z, basis)
    assert coords is not None and any(coords)


def test_centralizer_blocks_1_2_3():
    pair = pair_of([(1, 1), (2, 1), (3, 1)])
    assert centralizer_dim(pair) == 4
    assert len(centralizer_basis(pair)) == 4


def test_centralizer_defining_equations_and_cross_blocks():
    pair = build_canonical(make_pencil([(0, [(1, 1), (2, -1)]), (2, [(1, 1), (1, -1)])]))
    basis = centralizer_basis(pair)
    assert len(basis) == centralizer_dim(pair) == 1 + 1
    lo = 3  # first index of the second eigenvalue
    for x in basis:
        assert is_g_skew(pair.g, x)
        assert commutator(x, pair.L).is_zero()
        # cross-eigenvalue blocks vanish exactly
        for i in range(lo):
            for j in range(lo, pair.n):
                assert x[i, j] == 0 and x[j, i] == 0


def test_m_ij_generator_matches_kernel():
    pair = pair_of([(1, 1), (2, 1)])
    (gen,) = m_ij_basis(pair, 0, 1).elements
    assert gen == mat([[0, 0, 1], [-1, 0, 0], [0, 0, 0]])


def test_m_ij_dimensions_and_commutativity():
    pair = pair_of([(2, 1), (2, -1)])
    basis = m_ij_basis(pair, 0, 1)
    assert len(basis) == 2
    a, b = basis.elements
    assert commutator(a, b).is_zero()
    for x in basis:
        assert is_g_skew(pair.g, x)
        assert commutator(x, pair.L).is_zero()


def test_m_ij_direct_sum_fills_centralizer():
    pair = pair_of([(1, 1), (1, -1), (2, 1)])
    gl = centralizer_basis(pair)
    gens = []
    for i in range(3):
        for j in range(i + 1, 3):
            gens.extend(m_ij_basis(pair, i, j).elements)
    assert len(gens) == len(gl) == centralizer_dim(pair) == 3
    stack = RatMat(len(gens), pair.n ** 2, [x for g in gens for x in g.vec()])
    assert rank(stack) == len(gl)
    for g in gens:
        assert member_coords(g, gl) is not None


def test_m_ij_index_errors():
    pair = build_canonical(make_pencil([(0, [(1, 1)]), (1, [(1, 1)])]))
    with pytest.raises(IndexError):
        m_ij_basis(pair, 0, 5)
    with pytest.raises(ValueError):
        m_ij_basis(pair, 0, 1)  # blocks in different eigenvalues


def test_centralizer_closed_under_bracket():
    pair = pair_of([(1, 1), (1, 1), (2, 1)])
    basis = centralizer_basis(pair)
    for a in basis:
        for b in basis:
            assert member_coords(commutator(a, b), basis) is not None


def test_member_coords_examples():
    pair = pair_of([(1, 1), (2, 1)])
    basis = so_basis(pair.g)
    first = basis[0]
    coords = member_coords(first, basis)
    assert coords[0] == 1 and not any(coords[1:])
    assert member_coords(RatMat.zeros(3, 3), basis) == [0, 0, 0]
    # L is g-symmetric and nonzero, so it cannot lie in the skew algebra
    assert member_coords(pair.L, centralizer_basis(pair)) is None


def test_subspace_basis_rejects_dependent():
    with pytest.raises(ValueError):
        SubspaceBasis(2, (RatMat.identity(2), 2 * RatMat.identity(2)))


def test_exports():
    pair = pair_of([(1, 1), (2, 1)])
    (dumped,) = basis_to_json(centralizer_basis(pair))
    # the kernel solver fixes the generator only up to scale
    z = mat([[0, 0, 1], [-1, 0, 0], [0, 0, 0]])
    parsed = mat([[Fraction(v) for v in row] for row in dumped])
    assert parsed == z or parsed == -z
    tagged = export_m_ij(pair)
    assert tagged[0]["blocks"] == [0, 1]
    assert tagged[0]["matrix"][0] == ["0", "0", "1"]
