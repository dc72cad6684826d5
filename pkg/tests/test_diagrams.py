import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings, strategies as st

from commat.algebra import build_action, generate_algebra
from commat.errors import (CyclicDiagram, DiagramSyntaxError, DuplicateEdge, FieldTooSmall,
                           NonCommuting, UnknownFamily, UnknownName)
from commat.exactlin import GF2, QQ, FieldSpec, rank
from commat.diagrams import (analyze, bundled, d3_stretched, dual_non_embedding,
                             family, family_abxy, family_abxy_alt, family_de, family_rd,
                             generator_counts, make_diagram, monomial_diagram,
                             parallelogram_lint, parse_diagram, realize, realize_generator,
                             serialize, to_svg)
from commat.modtheory import preset


@st.composite
def raw_diagrams(draw, max_v=5, max_g=3):
    """Random acyclic-per-generator diagrams; they need not commute."""
    n = draw(st.integers(1, max_v))
    g = draw(st.integers(1, max_g))
    verts = [f"v{i}" for i in range(n)]
    gens = [chr(ord("a") + h) for h in range(g)]
    edges = []
    for h in gens:
        for i in range(n):
            # edges only go to larger indices, so every generator is acyclic
            t = draw(st.integers(i, n))
            if i < t < n:
                edges.append((h, verts[i], verts[t]))
    perm = draw(st.permutations(verts))
    return make_diagram(gens, perm, edges, draw(st.sampled_from([GF2, QQ, FieldSpec(3)])))


@pytest.mark.parametrize("name,dims", [("d4gen", (4, 5)), ("d4gen2", (4, 5)), ("d3gen1", (4, 4)),
                                       ("d3gen2", (10, 10)), ("d3genEq", (7, 7))])
def test_bundled_dimensions(name, dims):
    d = bundled(name)
    assert parallelogram_lint(d) == []
    rep = analyze(d)
    assert (rep.dimM, rep.dimA) == dims
    assert rep.faithful


def test_d4gen_labels_and_invariants():
    ga = generate_algebra(realize(bundled("d4gen")))
    assert set(ga.label_strings()) == {"1", "e13", "e14", "e23", "e24"}
    rep = analyze(bundled("d4gen"))
    assert rep.minGenerators == 2 and rep.socleLength == 2


def test_d3geneq_relations_are_identities():
    act = realize(bundled("d3genEq"))
    a, b, c = (act.generator(x) for x in "abc")
    assert a @ a == b @ c and b @ b == a @ c and c @ c == a @ b
    rels = analyze(bundled("d3genEq")).relations
    for r in ("a^2 = bc", "b^2 = ac", "c^2 = ab"):
        assert r in rels


@pytest.mark.parametrize("i", [1, 2, 3])
def test_stretched_variant(i):
    base = analyze(bundled("d3genEq"))
    rep = analyze(d3_stretched(i))
    assert (rep.dimM - base.dimM, rep.dimA - base.dimA) == (i, i)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_abxy_formula(m):
    rep = analyze(family_abxy(m))
    assert 2 * rep.dimM == 5 * m * m + 3 * m
    assert rep.dimA == 3 * m * m + 2 * m


@pytest.mark.parametrize("m", [1, 2, 3])
def test_abxy_alt_formula(m):
    rep = analyze(family_abxy_alt(m))
    assert (rep.dimM, rep.dimA) == (4 * m * m, 5 * m * m)


def test_rd_family():
    assert (analyze(family_rd(3, 5)).dimM, analyze(family_rd(3, 5)).dimA) == (8, 16)
    rep = analyze(family_rd(1, 1))
    assert (rep.dimM, rep.dimA) == (2, 2)


def test_de_family_and_field_size():
    act = family_de(2, FieldSpec(5))
    assert (act.dim, generate_algebra(act).dim) == (8, 10)
    with pytest.raises(FieldTooSmall):
        family_de(3, FieldSpec(3))


def test_family_dispatch():
    assert family("abxy", GF2, m=1).dim == 4
    with pytest.raises(UnknownFamily):
        family("nope")
    with pytest.raises(ValueError):
        family("abxy", GF2, m=0)
    A = family("frobenius", GF2, ns=[1, 1])
    assert A.dim == 4
    assert analyze(monomial_diagram(A)).dimA == 4


def test_monomial_diagram_is_regular_module():
    for name in ("st2", "s2t2", "stu2", "s3_st_t2"):
        A = preset(name, GF2)
        rep = analyze(monomial_diagram(A))
        assert rep.dimM == rep.dimA == A.dim
        assert rep.minGenerators == 1
        assert rep.socleLength == A.socle_length()


def test_parse_errors_have_positions():
    with pytest.raises(DuplicateEdge) as e:
        parse_diagram("gens a\nverts x y z\na: x -> y\na: x -> z\n")
    assert e.value.line == 4
    with pytest.raises(UnknownName) as e:
        parse_diagram("gens a\nverts x y\na: x -> q\n")
    assert (e.value.line, e.value.col, e.value.kind) == (3, 9, "vertex")
    with pytest.raises(UnknownName) as e:
        parse_diagram("gens a\nverts x y\nb: x -> y\n")
    assert e.value.kind == "generator"
    with pytest.raises(DiagramSyntaxError) as e:
        parse_diagram("gens a\nverts x y\nhello world\n")
    assert e.value.line == 3
    with pytest.raises(DiagramSyntaxError):
        parse_diagram("gens a\n")
    with pytest.raises(DiagramSyntaxError):
        parse_diagram("field F 4\nverts x\n")
    with pytest.raises(CyclicDiagram):
        parse_diagram("gens a\nverts x y\na: x -> y\na: y -> x\n")


def test_comments_and_defaults():
    d = parse_diagram("# a comment\nverts x y  # two vertices\ngens s\ns: x -> y\n")
    assert d.field == GF2 and d.dim == 2


def test_lint_reports_deleted_square():
    d = bundled("d3genEq").without_edge("b", "y2")
    viols = parallelogram_lint(d)
    assert any((v.source, v.middle, v.end) == ("x1", "y1", "z2") for v in viols)
    with pytest.raises(NonCommuting):
        realize(d)


@settings(max_examples=200, deadline=None)
@given(raw_diagrams())
def test_lint_iff_commuting(d):
    mats = [(g, realize_generator(d, g)) for g in d.gens]
    try:
        build_action(d.field, mats)
        commutes = True
    except NonCommuting:
        commutes = False
    assert commutes == (parallelogram_lint(d) == [])


@settings(max_examples=100, deadline=None)
@given(raw_diagrams())
def test_serialize_round_trip(d):
    assert parse_diagram(serialize(d)) == d


@settings(max_examples=100, deadline=None)
@given(raw_diagrams())
def test_generator_counts_match_rank(d):
    counts = generator_counts(d)
    for g in d.gens:
        assert counts[g] == d.dim - rank(realize_generator(d, g))


@pytest.mark.parametrize("p", [2, 3])
def test_dual_non_embedding(p):
    rep = dual_non_embedding(FieldSpec(p))
    assert rep.vectorsChecked == p ** 3
    assert rep.everyVectorAnnihilated
    assert rep.restrictionsIsomorphic and rep.factorsA == ("x^2", "x")


def test_svg_is_well_formed():
    svg = to_svg(bundled("d3genEq"))
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")


ALT_THREE_GEN = """gens a b c
verts x1 x2 y0 y1 y2 z1 z2
a: x1 -> y0
b: x1 -> y1
c: x1 -> y2
a: x2 -> y1
b: x2 -> y2
c: x2 -> y0
a: y0 -> z1
b: y2 -> z1
c: y1 -> z1
a: y1 -> z2
b: y0 -> z2
c: y2 -> z2
a: y2 -> z1
b: y1 -> z1
c: y0 -> z1
"""


def test_alternative_three_generator_completion():
    # another completion of the same picture has the same invariants
    d = parse_diagram(ALT_THREE_GEN)
    assert parallelogram_lint(d) == []
    rep = analyze(d)
    assert (rep.dimM, rep.dimA) == (7, 7)
    for r in ("a^2 = bc", "b^2 = ac", "c^2 = ab"):
        assert r in rep.relations
