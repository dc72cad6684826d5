import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from commat.algebra import build_action, generate_algebra
from commat.errors import BudgetExceeded, IdealsIntersect, LengthTooLarge, NotLocal, NotIsomorphic
from commat.exactlin import GF2, QQ, FieldSpec, Matrix, Subspace, rank
from commat.modtheory import (PRESETS, EnumerationStats, GlueSpec, LocalAlgebra, ModuleOverLocal,
                              action_invariants, cyclic_module, enumerate_reps, frobenius, glue,
                              hom_space, lt3_decompose, preset, random_faithful_module,
                              random_ideal, square_zero, st_power, subdirect_simple_socles,
                              sum_of_local_tops, product_map, faithful_small_subfactor)

F3 = FieldSpec(3)

EXPECTED = {  # name: (dim, socle length, Loewy length)
    "s2": (2, 1, 2), "s3": (3, 1, 3), "s4": (4, 1, 4),
    "st2": (3, 2, 2), "s2t2": (4, 1, 3), "s3_st_t2": (4, 2, 3),
    "stu2": (4, 3, 2), "st3": (6, 3, 3),
}


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets(name):
    A = preset(name, GF2)
    A.validate()
    assert (A.dim, A.socle_length(), A.loewy_length()) == EXPECTED[name]
    assert A.labels[0] == "1"


def test_frobenius_and_powers():
    A = frobenius(GF2, [1, 1, 1, 1])
    assert A.dim == 16 and A.socle_length() == 1 and A.embedding_dimension == 4
    assert A.is_frobenius()
    B = st_power(F3, 3)
    assert B.dim == 6 and B.socle_length() == 3
    C = square_zero(GF2, 4)
    assert C.dim == 5 and C.socle_length() == 4


def test_from_generated_requires_nilpotent():
    ga = generate_algebra(build_action(QQ, {"f": Matrix(QQ, [[1, 0], [0, 2]])}))
    with pytest.raises(NotLocal):
        LocalAlgebra.from_generated(ga)
    J = Matrix(QQ, [[0, 1], [0, 0]])
    A = LocalAlgebra.from_generated(generate_algebra(build_action(QQ, {"s": J})))
    assert A.dim == 2 and A.socle_length() == 1


def test_bad_table_rejected():
    # x^2 = 1 is not nilpotent
    table = [[(1, 0), (0, 1)], [(0, 1), (1, 0)]]
    with pytest.raises(NotLocal):
        LocalAlgebra(QQ, ["1", "x"], table)


def brute_force_reps(A: LocalAlgebra, d: int):
    """All modules on k^d over F_2 by checking every tuple of d x d matrices."""
    ga, _ = A.presentation()
    g = len(A.generator_indices)
    allm = [Matrix.from_flat(GF2, d, d, bits)
            for bits in itertools.product((0, 1), repeat=d * d)]
    ident = Matrix.identity(GF2, d)

    def mono(chosen, exps):
        out = ident
        for X, e in zip(chosen, exps):
            out = (X ** e) @ out
        return out

    count = faithful = 0
    for chosen in itertools.product(allm, repeat=g):
        if any(not chosen[i].commutes_with(chosen[j]) for i in range(g) for j in range(i)):
            continue
        ok = True
        for rel in ga.relations:
            rhs = Matrix.zeros(GF2, d)
            for c, lab in zip(rel.coordinates, ga.labels):
                if c:
                    rhs = rhs + mono(chosen, lab).scale(c)
            if mono(chosen, rel.exponents) != rhs:
                ok = False
                break
        if not ok:
            continue
        count += 1
        images = [mono(chosen, lab).entries for lab in ga.labels]
        faithful += rank(Matrix(GF2, images, d * d)) == A.dim
    return count, faithful


@pytest.mark.parametrize("name,d", [("s2", 1), ("s2", 2), ("s3", 2), ("st2", 1), ("st2", 2),
                                    ("s2t2", 2), ("s3", 3)])
def test_enumerate_reps_matches_brute_force(name, d):
    A = preset(name, GF2)
    stats = EnumerationStats()
    mods = list(enumerate_reps(A, d, stats=stats))
    assert stats.modules == len(mods)
    assert (stats.modules, stats.faithful) == brute_force_reps(A, d)
    for M in mods[:20]:
        M.validate()


def test_enumerate_reps_shards_partition():
    A = preset("st2", GF2)
    total = sum(1 for _ in enumerate_reps(A, 2))
    parts = [sum(1 for _ in enumerate_reps(A, 2, shard=(i, 3))) for i in range(3)]
    assert sum(parts) == total


def test_enumerate_reps_budget():
    A = preset("st2", GF2)
    stats = EnumerationStats()
    with pytest.raises(BudgetExceeded) as exc:
        for _ in enumerate_reps(A, 3, budget=50, stats=stats):
            pass
    assert exc.value.partial is stats and stats.nodes >= 50


modules_strategy = st.tuples(st.sampled_from(["st2", "s2t2", "s3_st_t2", "stu2", "s3"]),
                             st.sampled_from([GF2, F3]), st.integers(0, 10 ** 6))


def _module(args):
    name, field, seed = args
    A = preset(name, field)
    return random_faithful_module(A, random.Random(seed))


@settings(max_examples=40, deadline=None)
@given(modules_strategy)
def test_random_module_is_valid_and_faithful(args):
    M = _module(args)
    M.validate()
    assert M.is_faithful()


@settings(max_examples=40, deadline=None)
@given(modules_strategy)
def test_duality_swaps_top_and_socle(args):
    M = _module(args)
    D = M.dual()
    assert D.socle_length() == M.min_generators()
    assert D.min_generators() == M.socle_length()
    assert D.dual().action == M.action


@settings(max_examples=40, deadline=None)
@given(modules_strategy)
def test_action_invariants_agree(args):
    M = _module(args)
    names = [M.algebra.labels[i] for i in M.algebra.generator_indices]
    inv = action_invariants(build_action(M.field, list(zip(names, M.generator_matrices))))
    assert inv.min_generators == M.min_generators()
    assert inv.socle_length == M.socle_length()
    assert list(inv.radical_lengths) == M.radical_lengths()


@settings(max_examples=25, deadline=None)
@given(modules_strategy)
def test_hom_from_regular_module(args):
    M = _module(args)
    # Hom_A(A, M) = M
    assert len(hom_space(M.algebra.regular_module(), M)) == M.dim


@settings(max_examples=40, deadline=None)
@given(modules_strategy, st.integers(0, 10 ** 6))
def test_submodule_and_quotient(args, seed):
    M = _module(args)
    rng = random.Random(seed)
    v = [M.field.random_element(rng) for _ in range(M.dim)]
    N = M.submodule_generated([v])
    assert M.is_submodule(N)
    S, Q = M.restrict(N), M.quotient(N)
    S.validate()
    Q.validate()
    assert S.dim + Q.dim == M.dim
    assert S.min_generators() <= 1


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["st2", "s2t2", "stu2", "s3"]), st.integers(0, 10 ** 6))
def test_lt3_decomposition(name, seed):
    rng = random.Random(seed)
    A = preset(name, GF2)
    M = random_faithful_module(A, rng)
    if M.dim > 3:
        with pytest.raises(LengthTooLarge):
            lt3_decompose(M)
        # restrict to a small quotient instead
        M = M.quotient(M.radical()) if M.radical().dim else M
        if M.dim > 3:
            return
    rep = lt3_decompose(M)
    total = Subspace.zero(M.field, M.dim)
    for p in rep.pieces:
        total = total + p
    assert total.dim == M.dim == sum(p.dim for p in rep.pieces)
    for sub in rep.modules:
        if rep.kind == "SumOfCyclics":
            assert sub.min_generators() == 1
        else:
            assert sub.socle_length() == 1


@settings(max_examples=25, deadline=None)
@given(modules_strategy)
def test_appendix_decompositions(args):
    M = _module(args)
    tops = sum_of_local_tops(M)
    assert all(m.min_generators() == 1 for m in tops.modules)
    sub = subdirect_simple_socles(M)
    assert all(q.socle_length() == 1 for q in sub.modules)
    assert rank(product_map(M, sub.pieces)) == M.dim
    fs = faithful_small_subfactor(M)
    n = M.algebra.socle_length()
    M1, M2, M3 = fs.modules
    assert M1.min_generators() <= n and M2.socle_length() <= n
    assert M3.min_generators() <= n and M3.socle_length() <= n


def test_glue_square_zero_example():
    A = square_zero(GF2, 4)
    e = [A.unit_vector(i) for i in range(5)]
    I1 = Subspace.span(GF2, 5, [e[1], e[2]])
    I2 = Subspace.span(GF2, 5, [e[3], e[4]])
    res = glue(A, GlueSpec(I1, I2, A.radical(), A.radical()))
    assert res.faithful and res.lengths["M"] == 4 and res.lengths["A"] == 5
    assert res.inequality_holds


def test_glue_errors():
    A = square_zero(GF2, 2)
    m = A.radical()
    with pytest.raises(IdealsIntersect):
        glue(A, GlueSpec(m, m, m, m))
    zero = Subspace.zero(GF2, A.dim)
    I = Subspace.span(GF2, A.dim, [A.unit_vector(1)])
    with pytest.raises(NotIsomorphic):
        glue(A, GlueSpec(zero, I, m, m))


def test_cyclic_module_and_ideals():
    A = preset("s2t2", GF2)
    rng = random.Random(3)
    for _ in range(20):
        I = random_ideal(A, rng)
        assert A.is_ideal(I)
        assert cyclic_module(A, I).dim == A.dim - I.dim
