import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from sympy import GF, QQ as SQQ
from sympy.polys.matrices import DomainMatrix

from commat.errors import DimensionMismatch
from commat.exactlin import (GF2, QQ, EchelonBasis, FieldSpec, Matrix, Scalar, Subspace,
                             inverse, is_prime, kernel_of, random_invertible, rank, rref,
                             solve)

FIELDS = [QQ, GF2, FieldSpec(3), FieldSpec(7)]


def sympy_rank(m: Matrix) -> int:
    if m.nrows == 0 or m.ncols == 0:
        return 0
    if m.field.is_finite:
        dom = GF(m.field.characteristic)
        rows = [[dom(int(x)) for x in r] for r in m.rows]
    else:
        dom = SQQ
        rows = [[dom(x.numerator, x.denominator) for x in r] for r in m.rows]
    return DomainMatrix(rows, m.shape, dom).rank()


@st.composite
def matrices(draw, max_dim=5, square=False):
    field = draw(st.sampled_from(FIELDS))
    r = draw(st.integers(1, max_dim))
    c = r if square else draw(st.integers(1, max_dim))
    entries = draw(st.lists(st.integers(-3, 3), min_size=r * c, max_size=r * c))
    return Matrix(field, [entries[i * c:(i + 1) * c] for i in range(r)], c)


def test_field_parsing():
    assert FieldSpec.parse("Q") == QQ
    for text in ("F2", "F 2", "GF(2)", "F_2"):
        assert FieldSpec.parse(text) == GF2
    assert str(FieldSpec.parse("F 7")) == "F7"
    with pytest.raises(ValueError):
        FieldSpec.parse("F4")
    with pytest.raises(ValueError):
        FieldSpec(2 ** 31 + 11)


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_scalar_arithmetic():
    F = FieldSpec(7)
    a = Scalar(F, 3)
    assert (a * a.inverse()).value == 1
    assert (a ** -1).value == 5
    assert (a / a).value == 1
    q = Scalar(QQ, Fraction(2, 3))
    assert (q + 1).value == Fraction(5, 3)
    with pytest.raises(ZeroDivisionError):
        Scalar(F, 0).inverse()


def test_matrix_basics():
    m = Matrix(QQ, [[1, 2], [3, 4]])
    assert m.shape == (2, 2)
    assert m[1, 0] == 3
    assert (m @ Matrix.identity(QQ, 2)) == m
    assert m.T[0, 1] == 3
    assert Matrix.unit(QQ, 2, 1, 2)[0, 1] == 1
    assert not m.commutes_with(m.T)
    with pytest.raises(DimensionMismatch):
        m @ Matrix.zeros(QQ, 3)
    with pytest.raises(DimensionMismatch):
        m + Matrix.identity(GF2, 2)
    assert Matrix(GF2, [[3, -1]]).rows == ((1, 1),)


def test_inverse_and_solve():
    m = Matrix(QQ, [[2, 1], [1, 1]])
    assert inverse(m) @ m == Matrix.identity(QQ, 2)
    assert solve(m, [3, 2]) == (1, 1)
    assert solve(Matrix(QQ, [[1, 1], [1, 1]]), [1, 2]) is None
    with pytest.raises(ZeroDivisionError):
        inverse(Matrix(GF2, [[1, 1], [1, 1]]))


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(m) == sympy_rank(m)


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    ker = kernel_of(m)
    assert ker.dim + rank(m) == m.ncols
    for v in ker.basis:
        assert not any(m.apply(v))


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_rref_is_idempotent(m):
    r, k = rref(m)
    r2, k2 = rref(r)
    assert r == r2 and k == k2 == rank(m)


@settings(max_examples=60, deadline=None)
@given(matrices(square=True), matrices(square=True))
def test_matmul_associative(a, b):
    if a.field != b.field or a.shape != b.shape:
        return
    c = a + b
    assert (a @ b) @ c == a @ (b @ c)
    assert a @ (b + c) == a @ b + a @ c
    assert (a @ b).T == b.T @ a.T


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(FIELDS), st.integers(1, 5), st.integers(0, 10 ** 6))
def test_random_invertible(field, n, seed):
    m = random_invertible(field, n, random.Random(seed))
    assert m @ inverse(m) == Matrix.identity(field, n)


@st.composite
def subspace_pairs(draw):
    field = draw(st.sampled_from(FIELDS))
    n = draw(st.integers(1, 5))
    def vecs():
        k = draw(st.integers(0, 4))
        flat = draw(st.lists(st.integers(-2, 2), min_size=k * n, max_size=k * n))
        return [flat[i * n:(i + 1) * n] for i in range(k)]
    return Subspace.span(field, n, vecs()), Subspace.span(field, n, vecs())


@settings(max_examples=150, deadline=None)
@given(subspace_pairs())
def test_subspace_lattice(pair):
    U, W = pair
    S, I = U + W, U & W
    assert S.dim + I.dim == U.dim + W.dim
    assert I <= U and I <= W and U <= S and W <= S
    for v in U.basis:
        coords = U.coordinates(v)
        assert coords is not None
    # complement indices really complement
    comp = U.complement_indices()
    units = [[1 if i == c else 0 for i in range(U.ambient_dim)] for c in comp]
    assert (U + Subspace.span(U.field, U.ambient_dim, units)).dim == U.ambient_dim


def test_echelon_basis_tracks_combinations():
    ech = EchelonBasis(QQ)
    assert ech.insert([1, 0, 1]) == (True, None)
    assert ech.insert([0, 1, 1])[0]
    new, coords = ech.insert([2, 3, 5])
    assert not new and tuple(coords) == (2, 3)
    assert ech.coordinates([0, 0, 1]) is None
    assert [1, 1, 2] in ech
