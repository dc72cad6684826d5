"""Module diagrams: a basis on which every generator acts by basis-or-zero.

Text format (``.cdg``), one statement per line, ``#`` starts a comment::

    field F 2            # or: field Q   (default F 2)
    gens a b c
    verts x1 x2 u v
    c: x1 -> u           # c x1 = u
    a: x2 -> u           # a x2 = u as well: shared targets express identifications

Each generator must be acyclic, so it acts nilpotently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterable, Sequence

from .algebra import CommutingAction, build_action, generate_algebra
from .errors import (CyclicDiagram, DiagramSyntaxError, DuplicateEdge, FieldTooSmall,
                     UnknownFamily, UnknownName)
from .exactlin import GF2, FieldSpec, Matrix, Subspace

NAME = r"[A-Za-z_][A-Za-z0-9_.^']*"
_NAME_RE = re.compile(NAME + r"\Z")
_EDGE_RE = re.compile(rf"\s*({NAME})\s*:\s*({NAME})\s*->\s*({NAME})\s*\Z")


@dataclass(frozen=True)
class ModuleDiagram:
    field: FieldSpec
    gens: tuple
    verts: tuple
    edges: frozenset  # of (generator, source, target)

    def target(self, gen: str, vertex: str):
        return self.targets[gen].get(vertex)

    @property
    def targets(self) -> dict:
        out = {g: {} for g in self.gens}
        for g, s, t in self.edges:
            out[g][s] = t
        return out

    def sorted_edges(self) -> list:
        gi = {g: i for i, g in enumerate(self.gens)}
        vi = {v: i for i, v in enumerate(self.verts)}
        return sorted(self.edges, key=lambda e: (gi[e[0]], vi[e[1]]))

    @property
    def dim(self) -> int:
        return len(self.verts)

    def with_field(self, field: FieldSpec) -> "ModuleDiagram":
        return ModuleDiagram(field, self.gens, self.verts, self.edges)

    def without_edge(self, gen: str, src: str) -> "ModuleDiagram":
        return ModuleDiagram(self.field, self.gens, self.verts,
                             frozenset(e for e in self.edges if (e[0], e[1]) != (gen, src)))


def make_diagram(gens: Sequence[str], verts: Sequence[str], edges: Iterable[tuple],
                 field: FieldSpec = GF2) -> ModuleDiagram:
    """Build and validate a diagram from Python data."""
    gens, verts = tuple(gens), tuple(verts)
    if not verts:
        raise DiagramSyntaxError("a diagram needs at least one vertex")
    for kind, names in (("generator", gens), ("vertex", verts)):
        if len(set(names)) != len(names):
            raise DiagramSyntaxError(f"duplicate {kind} name")
    gset, vset = set(gens), set(verts)
    seen = set()
    out = set()
    for g, s, t in edges:
        if g not in gset:
            raise UnknownName(g, "generator")
        for v in (s, t):
            if v not in vset:
                raise UnknownName(v, "vertex")
        if (g, s) in seen:
            raise DuplicateEdge(s, g)
        seen.add((g, s))
        out.add((g, s, t))
    d = ModuleDiagram(field, gens, verts, frozenset(out))
    check_acyclic(d)
    return d


def check_acyclic(d: ModuleDiagram):
    for g, tg in d.targets.items():
        state = {}
        for start in d.verts:
            path = []
            v = start
            while v is not None and state.get(v) is None:
                state[v] = "open"
                path.append(v)
                v = tg.get(v)
            if v is not None and state.get(v) == "open":
                cycle = path[path.index(v):]
                raise CyclicDiagram(g, cycle)
            for u in path:
                state[u] = "done"


# ---------------------------------------------------------------------------
# Parsing and serialisation
# ---------------------------------------------------------------------------

def parse_diagram(text: str) -> ModuleDiagram:
    field = None
    gens: list = []
    verts: list = []
    edges = []
    seen: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        col = len(body) - len(body.lstrip()) + 1
        words = body.split()
        head = words[0]
        if head == "field":
            if field is not None:
                raise DiagramSyntaxError("field declared twice", lineno, col)
            spec = "".join(words[1:])
            try:
                field = FieldSpec.parse(spec)
            except ValueError as exc:
                raise DiagramSyntaxError(str(exc), lineno, col + len("field ")) from None
            continue
        if head in ("gens", "verts"):
            names = words[1:]
            target = gens if head == "gens" else verts
            if not names:
                raise DiagramSyntaxError(f"empty {head} list", lineno, col + len(head))
            pos = col + len(head)
            for nm in names:
                pos = body.index(nm, pos - 1) + 1
                if not _NAME_RE.match(nm):
                    raise DiagramSyntaxError(f"invalid name {nm!r}", lineno, pos)
                if nm in gens or nm in verts:
                    raise DiagramSyntaxError(f"name {nm!r} declared twice", lineno, pos)
                target.append(nm)
            continue
        m = _EDGE_RE.match(body)
        if not m:
            if ":" in body:
                c = body.index(":") + 1
                rest = body[c:]
                if "->" not in rest:
                    raise DiagramSyntaxError("expected '->' in edge", lineno, c + 1)
            raise DiagramSyntaxError(
                f"expected 'field', 'gens', 'verts' or '<gen>: <src> -> <dst>', got {head!r}",
                lineno, col)
        g, s, t = m.groups()
        if g not in gens:
            raise UnknownName(g, "generator", lineno, m.start(1) + 1)
        if s not in verts:
            raise UnknownName(s, "vertex", lineno, m.start(2) + 1)
        if t not in verts:
            raise UnknownName(t, "vertex", lineno, m.start(3) + 1)
        if (g, s) in seen:
            raise DuplicateEdge(s, g, lineno, m.start(1) + 1)
        seen[(g, s)] = lineno
        edges.append((g, s, t))
    if not verts:
        raise DiagramSyntaxError("missing or empty 'verts' declaration", 1, 1)
    d = ModuleDiagram(field or GF2, tuple(gens), tuple(verts), frozenset(edges))
    check_acyclic(d)
    return d


def serialize(d: ModuleDiagram) -> str:
    p = d.field.characteristic
    lines = [f"field F {p}" if p else "field Q"]
    if d.gens:
        lines.append("gens " + " ".join(d.gens))
    lines.append("verts " + " ".join(d.verts))
    lines.extend(f"{g}: {s} -> {t}" for g, s, t in d.sorted_edges())
    return "\n".join(lines) + "\n"


def load_diagram(path) -> ModuleDiagram:
    with open(path, encoding="utf-8") as fh:
        return parse_diagram(fh.read())


BUNDLED = ("d4gen", "d4gen2", "d3gen1", "d3gen2", "d3genEq")


def bundled_text(name: str) -> str:
    stem = name[:-4] if name.endswith(".cdg") else name
    if stem not in BUNDLED:
        raise KeyError(f"no bundled diagram {name!r}")
    return resources.files("commat").joinpath("data").joinpath(stem + ".cdg").read_text(encoding="utf-8")


def bundled(name: str) -> ModuleDiagram:
    return parse_diagram(bundled_text(name))


# ---------------------------------------------------------------------------
# Validation and realisation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """An in-edge g: source -> middle followed by an out-edge h: middle -> end
    whose commuting square is missing."""

    source: str
    middle: str
    end: str
    first: str
    second: str

    def __str__(self):
        return (f"({self.source}, {self.middle}, {self.end}): {self.first} then {self.second} "
                f"is not matched by {self.second} then {self.first}")


def parallelogram_lint(d: ModuleDiagram) -> list[Violation]:
    """Every path u -g-> v -h-> w with g != h needs u -h-> v' -g-> w.

    Forks (two edges out of one vertex, or two edges into one vertex) are
    not constrained.  For diagrams this is equivalent to commutation.
    """
    tg = d.targets
    out = []
    for u in d.verts:
        for g in d.gens:
            v = tg[g].get(u)
            if v is None:
                continue
            for h in d.gens:
                if h == g:
                    continue
                w = tg[h].get(v)
                if w is None:
                    continue
                v2 = tg[h].get(u)
                if v2 is None or tg[g].get(v2) != w:
                    out.append(Violation(u, v, w, g, h))
    return out


def realize(d: ModuleDiagram) -> CommutingAction:
    """0/1 matrices: column v of generator g has its 1 in the row of g(v)."""
    index = {v: i for i, v in enumerate(d.verts)}
    n = len(d.verts)
    F = d.field
    mats = {}
    for g in d.gens:
        rows = [[F.zero] * n for _ in range(n)]
        for v, w in d.targets[g].items():
            rows[index[w]][index[v]] = F.one
        mats[g] = Matrix(F, rows, n, _normalised=True)
    if not d.gens:
        from .algebra import trivial_action
        return trivial_action(F, n)
    return build_action(F, [(g, mats[g]) for g in d.gens])


@dataclass(frozen=True)
class DiagramReport:
    dimM: int
    dimA: int
    faithful: bool
    commutes: bool
    minGenerators: int
    socleLength: int
    relations: tuple


def analyze(d: ModuleDiagram) -> DiagramReport:
    from .modtheory import action_invariants
    act = realize(d)
    ga = generate_algebra(act)
    inv = action_invariants(act)
    return DiagramReport(act.dim, ga.dim, ga.annihilator().faithful, True,
                         inv.min_generators, inv.socle_length,
                         tuple(ga.relation_strings()))


def generator_counts(d: ModuleDiagram) -> dict:
    """Number of generators of M as a module over k[g], for each generator g.

    For a nilpotent g this is dim M - rank g, and the rank of a 0/1 diagram
    matrix is its number of distinct edge targets.
    """
    return {g: d.dim - len(set(d.targets[g].values())) for g in d.gens}


def realize_generator(d: ModuleDiagram, g: str) -> Matrix:
    index = {v: i for i, v in enumerate(d.verts)}
    n = len(d.verts)
    F = d.field
    rows = [[F.zero] * n for _ in range(n)]
    for v, w in d.targets[g].items():
        rows[index[w]][index[v]] = F.one
    return Matrix(F, rows, n, _normalised=True)


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------

def _need_positive(**params):
    for k, v in params.items():
        if not isinstance(v, int) or v < 1:
            raise ValueError(f"parameter {k} must be a positive integer, got {v!r}")


def _vx(i, j):
    return f"x_{i}_{j}"


def _vy(i, j):
    return f"y_{i}_{j}"


def _ab_cd_family(m: int, xs: list, ys: list, field: FieldSpec) -> ModuleDiagram:
    """a, b raise exponents inside the basis; c, d send a^i b^j y to a^(m+i) b^j x and
    a^i b^(m+j) x."""
    xset, yset = set(xs), set(ys)
    edges = []
    for (tag, pts, pset) in (("x", xs, xset), ("y", ys, yset)):
        name = _vx if tag == "x" else _vy
        for i, j in pts:
            if (i + 1, j) in pset:
                edges.append(("a", name(i, j), name(i + 1, j)))
            if (i, j + 1) in pset:
                edges.append(("b", name(i, j), name(i, j + 1)))
    for i, j in ys:
        if (m + i, j) in xset:
            edges.append(("c", _vy(i, j), _vx(m + i, j)))
        if (i, m + j) in xset:
            edges.append(("d", _vy(i, j), _vx(i, m + j)))
    verts = [_vx(i, j) for i, j in xs] + [_vy(i, j) for i, j in ys]
    return make_diagram("abcd", verts, edges, field)


def family_abxy(m: int, field: FieldSpec = GF2) -> ModuleDiagram:
    """Basis a^i b^j x (i + j <= 2m - 1) and a^i b^j y (i + j <= m - 1)."""
    _need_positive(m=m)
    xs = sorted((i, j) for i in range(2 * m) for j in range(2 * m) if i + j <= 2 * m - 1)
    ys = sorted((i, j) for i in range(m) for j in range(m) if i + j <= m - 1)
    return _ab_cd_family(m, xs, ys, field)


def family_abxy_alt(m: int, field: FieldSpec = GF2) -> ModuleDiagram:
    """Basis a^i b^j x (i, j < 2m, min(i, j) < m) and a^i b^j y (i, j < m)."""
    _need_positive(m=m)
    xs = sorted((i, j) for i in range(2 * m) for j in range(2 * m) if min(i, j) < m)
    ys = sorted((i, j) for i in range(m) for j in range(m))
    return _ab_cd_family(m, xs, ys, field)


def family_matrix_units(field: FieldSpec = GF2) -> ModuleDiagram:
    return bundled("d4gen").with_field(field)


def family_rd(e0: int, e1: int, field: FieldSpec = GF2) -> ModuleDiagram:
    """V = V0 + V1 with one generator v_i -> w_j for every pair of basis vectors."""
    _need_positive(e0=e0, e1=e1)
    v0 = [f"v{i + 1}" for i in range(e0)]
    v1 = [f"w{j + 1}" for j in range(e1)]
    gens = [f"g{i + 1}_{j + 1}" for i in range(e0) for j in range(e1)]
    edges = [(f"g{i + 1}_{j + 1}", v0[i], v1[j]) for i in range(e0) for j in range(e1)]
    return make_diagram(gens, v0 + v1, edges, field)


def family_de(m: int, field: FieldSpec) -> CommutingAction:
    """Generators D + E13, E14, E23, E24 on k^(4m); D is block scalar with values 1..m."""
    _need_positive(m=m)
    p = field.characteristic
    if p and p < m + 1:
        raise FieldTooSmall(f"need at least {m + 1} field elements for m = {m}, got F{p}")
    n = 4 * m
    F = field

    def units(i, j):
        rows = [[F.zero] * n for _ in range(n)]
        for b in range(m):
            rows[4 * b + i - 1][4 * b + j - 1] = F.one
        return rows

    d_rows = units(1, 3)
    for b in range(m):
        for k in range(4):
            d_rows[4 * b + k][4 * b + k] = F(b + 1)
    mats = [("D+E13", Matrix(F, d_rows, n)), ("E14", Matrix(F, units(1, 4), n)),
            ("E23", Matrix(F, units(2, 3), n)), ("E24", Matrix(F, units(2, 4), n))]
    return build_action(F, mats)


def monomial_diagram(alg) -> ModuleDiagram:
    """Regular module of a monomial quotient algebra, drawn on its monomial basis."""
    exps = alg.exponents
    names = alg.variables
    index = {e: i for i, e in enumerate(exps)}
    vname = [("m_" + "_".join(map(str, e))) for e in exps]
    gens = [f"t{i + 1}" for i in range(len(names))] if len(names) > 3 else list(names)
    edges = []
    for e in exps:
        for k in range(len(names)):
            f = e[:k] + (e[k] + 1,) + e[k + 1:]
            if f in index:
                edges.append((gens[k], vname[index[e]], vname[index[f]]))
    return make_diagram(gens, vname, edges, alg.field)


def family_frobenius(ns: Sequence[int], field: FieldSpec = GF2):
    from .modtheory import frobenius
    return frobenius(field, list(ns))


def family_st_power(n: int, field: FieldSpec = GF2):
    from .modtheory import st_power
    _need_positive(n=n)
    return st_power(field, n)


def d3_stretched(i: int, field: FieldSpec = GF2) -> ModuleDiagram:
    """The seven-vertex example with c x2 = a^i y0 instead of y0.

    Adds vertices a y0, ..., a^i y0 on an a-chain from y0 down to z2.
    """
    base = bundled("d3genEq").with_field(field)
    if i == 0:
        return base
    if i < 0:
        raise ValueError("stretch must be nonnegative")
    ws = [f"w{k}" for k in range(1, i + 1)]
    edges = [e for e in base.edges if e[:2] not in (("a", "y0"), ("c", "x2"))]
    chain = ["y0"] + ws + ["z2"]
    edges += [("a", s, t) for s, t in zip(chain, chain[1:])]
    edges.append(("c", "x2", ws[-1]))
    return make_diagram(base.gens, base.verts + tuple(ws), edges, field)


FAMILIES = {
    "abxy": ("m",),
    "abxy_alt": ("m",),
    "matrix_units": (),
    "de": ("m",),
    "rd": ("e0", "e1"),
    "frobenius": ("ns",),
    "st_power": ("n",),
    "d3_stretched": ("i",),
}


def family(name: str, field: FieldSpec = GF2, **params):
    """Instantiate a family by name; returns a diagram, an action or a local algebra."""
    if name not in FAMILIES:
        raise UnknownFamily(name)
    if name == "abxy":
        return family_abxy(params["m"], field)
    if name == "abxy_alt":
        return family_abxy_alt(params["m"], field)
    if name == "matrix_units":
        return family_matrix_units(field)
    if name == "de":
        return family_de(params["m"], field)
    if name == "rd":
        return family_rd(params["e0"], params["e1"], field)
    if name == "frobenius":
        return family_frobenius(params["ns"], field)
    if name == "st_power":
        return family_st_power(params["n"], field)
    return d3_stretched(params["i"], field)


# ---------------------------------------------------------------------------
# Duality example
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DualNonEmbeddingReport:
    field: str
    dimA: int
    dimM: int
    vectorsChecked: int
    everyVectorAnnihilated: bool
    factorsA: tuple
    factorsM: tuple
    restrictionsIsomorphic: bool


def dual_non_embedding(field: FieldSpec = GF2) -> DualNonEmbeddingReport:
    """A = k[s,t]/(s,t)^2 and M = Hom_k(A, k).

    Every element of M has a nonzero annihilator, so A does not embed in M,
    although A and M are isomorphic as k[s]-modules.
    """
    import itertools
    from .modtheory import preset
    from .pid import endomorphism_factors
    if not field.is_finite:
        raise ValueError("the exhaustive check needs a finite field")
    A = preset("st2", field)
    M = A.regular_module().dual()
    count = 0
    all_killed = True
    for v in itertools.product(field.elements(), repeat=M.dim):
        count += 1
        if M.element_annihilator(v).dim == 0:
            all_killed = False
    s = A.generator_indices[0]
    fa = endomorphism_factors(A.left_matrices()[s])
    fm = endomorphism_factors(M.action[s])
    return DualNonEmbeddingReport(str(field), A.dim, M.dim, count, all_killed,
                                  tuple(fa.fmt()), tuple(fm.fmt()), fa == fm)


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_COLOURS = ("#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#16a085", "#7f8c8d")


def to_svg(d: ModuleDiagram) -> str:
    """Layered drawing: depth = longest path from a vertex with no in-edges."""
    depth = {v: 0 for v in d.verts}
    changed = True
    while changed:
        changed = False
        for g, s, t in d.edges:
            if depth[t] < depth[s] + 1:
                depth[t] = depth[s] + 1
                changed = True
    layers: dict = {}
    for v in d.verts:
        layers.setdefault(depth[v], []).append(v)
    pos = {}
    for lvl, vs in layers.items():
        for k, v in enumerate(vs):
            pos[v] = (60 + 80 * k, 40 + 70 * lvl)
    width = 120 + 80 * max(len(vs) for vs in layers.values())
    height = 80 + 70 * max(layers)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">']
    for gi, g in enumerate(d.gens):
        colour = _COLOURS[gi % len(_COLOURS)]
        for s, t in sorted(d.targets[g].items()):
            (x1, y1), (x2, y2) = pos[s], pos[t]
            out.append(f'<line x1="{x1}" y1="{y1 + 8}" x2="{x2}" y2="{y2 - 12}" '
                       f'stroke="{colour}" stroke-width="2"><title>{g}</title></line>')
    for v, (x, y) in pos.items():
        out.append(f'<text x="{x}" y="{y}" text-anchor="middle" font-family="serif">{v}</text>')
    for gi, g in enumerate(d.gens):
        out.append(f'<text x="{width - 50}" y="{20 + 16 * gi}" fill="{_COLOURS[gi % len(_COLOURS)]}" '
                   f'font-family="serif">{g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
