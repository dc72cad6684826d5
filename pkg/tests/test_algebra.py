import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from commat.algebra import (build_action, cayley_hamilton_check, generate_algebra,
                            monomial_str)
from commat.errors import DimensionMismatch, NonCommuting
from commat.exactlin import GF2, QQ, FieldSpec, Matrix, Subspace, random_matrix

FIELDS = [QQ, GF2, FieldSpec(3), FieldSpec(5)]


def closure_dim_oracle(action) -> int:
    """dim of the unital algebra: saturate span{I} under left multiplication, via sympy."""
    field = action.field
    p = field.characteristic
    n = action.dim

    def to_sym(m):
        return sympy.Matrix(n, n, lambda i, j: sympy.Rational(m[i][j]) if not p else int(m[i][j]) % p)

    def rank_of(mats):
        rows = [list(m) for m in mats]
        if p:
            return _rank_mod_p(rows, p)
        return sympy.Matrix(rows).rank()

    gens = [to_sym(g.rows) for g in action.gens]
    span = [sympy.eye(n)]
    frontier = [sympy.eye(n)]
    current = 1
    while frontier:
        nxt = []
        for b in frontier:
            for g in gens:
                c = g * b
                if p:
                    c = c.applyfunc(lambda x: x % p)
                r = rank_of(span + [c])
                if r > current:
                    span.append(c)
                    nxt.append(c)
                    current = r
        frontier = nxt
    return current


def _rank_mod_p(rows, p):
    from sympy import GF
    from sympy.polys.matrices import DomainMatrix
    dom = GF(p)
    return DomainMatrix([[dom(int(x)) for x in r] for r in rows], (len(rows), len(rows[0])), dom).rank()


@st.composite
def commuting_actions(draw):
    """A few polynomials without constant term in one random matrix."""
    field = draw(st.sampled_from(FIELDS))
    seed = draw(st.integers(0, 10 ** 6))
    rng = random.Random(seed)
    n = draw(st.integers(1, 5))
    X = random_matrix(field, n, n, rng, bound=2)
    if draw(st.booleans()):
        # make X nilpotent: strictly upper triangular part
        X = Matrix(field, [[X[i, j] if j > i else 0 for j in range(n)] for i in range(n)], n)
    k = draw(st.integers(1, 3))
    gens = []
    for h in range(k):
        coeffs = [field.random_element(rng, 2) for _ in range(3)]
        m = Matrix.zeros(field, n)
        power = Matrix.identity(field, n)
        for c in coeffs:
            power = X @ power
            m = m + power.scale(c)
        gens.append((f"g{h}", m))
    return build_action(field, gens)


def test_build_action_errors():
    a = Matrix(QQ, [[0, 1], [0, 0]])
    b = Matrix(QQ, [[0, 0], [1, 0]])
    with pytest.raises(NonCommuting) as exc:
        build_action(QQ, {"a": a, "b": b})
    assert exc.value.pair == ("a", "b")
    assert exc.value.column in (0, 1)
    with pytest.raises(DimensionMismatch):
        build_action(QQ, {"a": a, "c": Matrix.zeros(QQ, 3)})
    with pytest.raises(ValueError):
        build_action(QQ, [("a", a), ("a", a)])


def test_monomial_str():
    assert monomial_str((0, 0, 0), "abc") == "1"
    assert monomial_str((2, 0, 1), "abc") == "a^2c"
    assert monomial_str((1, 1), ["e13", "e14"]) == "e13*e14"
    assert monomial_str((2, 1), ["D+E13", "E14"]) == "(D+E13)^2*E14"


def test_single_jordan_block():
    n = 4
    J = Matrix(QQ, [[1 if j == i + 1 else 0 for j in range(n)] for i in range(n)], n)
    ga = generate_algebra(build_action(QQ, {"s": J}))
    assert ga.dim == 4
    assert ga.label_strings() == ["1", "s", "s^2", "s^3"]
    assert ga.relation_strings() == ["s^4 = 0"]


@settings(max_examples=60, deadline=None)
@given(commuting_actions())
def test_dimension_matches_oracle(action):
    ga = generate_algebra(action)
    assert ga.dim == closure_dim_oracle(action)


@settings(max_examples=60, deadline=None)
@given(commuting_actions())
def test_relations_are_matrix_identities(action):
    ga = generate_algebra(action)
    assert ga.basis[0] == Matrix.identity(action.field, action.dim)
    for rel in ga.relations:
        assert ga.evaluate(rel.exponents) == ga.element(rel.coordinates)
    for lab, b in zip(ga.labels, ga.basis):
        assert ga.evaluate(lab) == b


@settings(max_examples=40, deadline=None)
@given(commuting_actions())
def test_structure_constants_commutative_associative(action):
    ga = generate_algebra(action)
    c = ga.structure_constants()
    d = ga.dim
    assert all(c[i][j] == c[j][i] for i in range(d) for j in range(d))
    for i in range(d):
        for j in range(d):
            assert ga.element(c[i][j]) == ga.basis[i] @ ga.basis[j]


@settings(max_examples=40, deadline=None)
@given(commuting_actions())
def test_annihilator_of_full_module_is_zero(action):
    ga = generate_algebra(action)
    rep = ga.annihilator()
    assert rep.faithful and rep.dim == 0 and rep.witness is None


@settings(max_examples=40, deadline=None)
@given(commuting_actions(), st.integers(0, 10 ** 6))
def test_annihilator_of_subspace(action, seed):
    rng = random.Random(seed)
    ga = generate_algebra(action)
    n = action.dim
    F = action.field
    W = Subspace.span(F, n, [[F.random_element(rng, 2) for _ in range(n)]])
    rep = ga.annihilator(W)
    # rank-nullity against the evaluation map A -> M^(dim W)
    images = [[x for w in W.basis for x in b.apply(w)] for b in ga.basis]
    if W.dim:
        assert rep.dim == ga.dim - _rank(F, images)
    for v in rep.subspace.basis:
        el = ga.element(v)
        assert all(not any(el.apply(w)) for w in W.basis)


def _rank(F, rows):
    from commat.exactlin import rank
    return rank(Matrix(F, rows, len(rows[0])))


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(FIELDS), st.integers(1, 6), st.integers(0, 10 ** 6))
def test_cayley_hamilton(field, n, seed):
    f = random_matrix(field, n, n, random.Random(seed), bound=3)
    assert cayley_hamilton_check(f, n)


def test_cayley_hamilton_fails_below_minimal_degree():
    J = Matrix(QQ, [[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert not cayley_hamilton_check(J, 2)
    assert cayley_hamilton_check(J, 3)


def test_max_dim_guard():
    J = Matrix(QQ, [[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    with pytest.raises(ArithmeticError):
        generate_algebra(build_action(QQ, {"s": J}), max_dim=2)
