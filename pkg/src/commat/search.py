"""Exhaustive search over small diagram modules.

A diagram on n vertices with g generators is stored as ``tg[h][v]``, the
target of vertex v under generator h, or -1.  For commuting diagrams the
union of all edges is acyclic (a cycle would give a monomial fixing a basis
vector, which is impossible for nilpotent commuting operators), so every
diagram arises from a smaller one by adding a vertex with no incoming edges.
The search grows diagrams one such source vertex at a time and keeps one
representative per isomorphism class, where isomorphism allows relabelling
both vertices and generators.

Canonical forms come from colour refinement with individualisation: the
joint vertex and generator colouring is refined to a stable partition, the
first non-singleton cell (generator cells before vertex cells) is split in
every possible way, and the smallest code over all leaves is kept.
"""

from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterator

from . import SCHEMA_VERSION
from .errors import BudgetExceeded
from .exactlin import GF2, FieldSpec

SCOPE = ("Search space: modules given by diagrams (each generator maps basis vectors to basis "
         "vectors or zero), up to relabelling of vertices and generators. Absence of a witness "
         "says nothing about commuting matrices that are not of this form.")


# ---------------------------------------------------------------------------
# Canonical forms
# ---------------------------------------------------------------------------

def _refine(n, g, tg, vc, gc):
    while True:
        ins = [[] for _ in range(n)]
        for h in range(g):
            row = tg[h]
            for v in range(n):
                t = row[v]
                if t >= 0:
                    ins[t].append((gc[h], vc[v]))
        vsig = [(vc[v],
                 tuple(sorted((gc[h], vc[tg[h][v]] if tg[h][v] >= 0 else -1) for h in range(g))),
                 tuple(sorted(ins[v]))) for v in range(n)]
        gsig = [(gc[h], tuple(sorted((vc[v], vc[tg[h][v]]) for v in range(n) if tg[h][v] >= 0)))
                for h in range(g)]
        vkeys = {s: i for i, s in enumerate(sorted(set(vsig)))}
        gkeys = {s: i for i, s in enumerate(sorted(set(gsig)))}
        nvc = [vkeys[s] for s in vsig]
        ngc = [gkeys[s] for s in gsig]
        if len(vkeys) == len(set(vc)) and len(gkeys) == len(set(gc)):
            return nvc, ngc
        vc, gc = nvc, ngc


def _leaf_code(n, g, tg, vc, gc):
    vorder = sorted(range(n), key=vc.__getitem__)
    gorder = sorted(range(g), key=gc.__getitem__)
    pos = {v: i for i, v in enumerate(vorder)}
    return tuple(tuple(pos[tg[h][v]] if tg[h][v] >= 0 else n for v in vorder) for h in gorder)


def canonical_form(n: int, g: int, tg) -> tuple:
    """Smallest leaf code; equal for two diagrams iff they are isomorphic.

    The code lists, for each generator in canonical order, the canonical
    position of the target of each vertex in canonical order (n = no edge).
    """
    best = None

    def rec(vc, gc):
        nonlocal best
        vc, gc = _refine(n, g, tg, vc, gc)
        for cols, is_gen in ((gc, True), (vc, False)):
            counts = {}
            for c in cols:
                counts[c] = counts.get(c, 0) + 1
            cells = [c for c in sorted(counts) if counts[c] > 1]
            if cells:
                c0 = cells[0]
                for i, c in enumerate(cols):
                    if c != c0:
                        continue
                    split = [2 * x + (1 if (x == c0 and j != i) else 0) for j, x in enumerate(cols)]
                    if is_gen:
                        rec([2 * x for x in vc], split)
                    else:
                        rec(split, [2 * x for x in gc])
                return
        code = _leaf_code(n, g, tg, vc, gc)
        if best is None or code < best:
            best = code

    rec([0] * n, [0] * g)
    return best


def code_to_tg(code) -> list:
    n = len(code[0]) if code else 0
    return [[x if x < n else -1 for x in row] for row in code]


def extensions(code, g: int) -> list:
    """All commuting diagrams obtained by adding one source vertex (index n)."""
    n = len(code[0])
    tg = code_to_tg(code)
    out = []
    for targets in itertools.product(range(-1, n), repeat=g):
        ok = True
        for h1 in range(g):
            t1 = targets[h1]
            for h2 in range(h1 + 1, g):
                t2 = targets[h2]
                a = tg[h2][t1] if t1 >= 0 else -1
                b = tg[h1][t2] if t2 >= 0 else -1
                if a != b:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append([row + [targets[h]] for h, row in enumerate(tg)])
    return out


def _expand(args):
    parents, g = args
    children = set()
    produced = 0
    for code in parents:
        for tg in extensions(code, g):
            produced += 1
            children.add(canonical_form(len(tg[0]), g, tg))
    return sorted(children), produced


def single_vertex_code(g: int) -> tuple:
    return tuple((1,) for _ in range(g))


# ---------------------------------------------------------------------------
# Conversions
# ---------------------------------------------------------------------------

def generator_names(g: int) -> list[str]:
    return list("abcdefgh"[:g]) if g <= 8 else [f"g{i + 1}" for i in range(g)]


def code_to_diagram(code, field: FieldSpec = GF2, names=None):
    from .diagrams import make_diagram
    g = len(code)
    n = len(code[0])
    names = names or generator_names(g)
    verts = [f"v{i + 1}" for i in range(n)]
    edges = [(names[h], verts[v], verts[t]) for h in range(g) for v, t in enumerate(code[h]) if t < n]
    return make_diagram(names, verts, edges, field)


def diagram_to_tg(d):
    index = {v: i for i, v in enumerate(d.verts)}
    tg = []
    for gname in d.gens:
        t = d.targets[gname]
        tg.append([index[t[v]] if v in t else -1 for v in d.verts])
    return len(d.verts), len(d.gens), tg


def canonical_code(d) -> tuple:
    n, g, tg = diagram_to_tg(d)
    return canonical_form(n, g, tg)


# ---------------------------------------------------------------------------
# Algebra dimension for diagram modules
# ---------------------------------------------------------------------------

def monomial_maps(n: int, tg) -> list[tuple]:
    """Distinct nonzero monomials in the generators, as partial maps on vertices."""
    ident = tuple(range(n))
    seen = {ident}
    order = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for f in frontier:
            for row in tg:
                h = tuple(row[x] if x >= 0 else -1 for x in f)
                if h in seen or all(x < 0 for x in h):
                    continue
                seen.add(h)
                order.append(h)
                nxt.append(h)
        frontier = nxt
    return order


def diagram_algebra_dim(n: int, tg, field: FieldSpec = GF2) -> int:
    """dim of the algebra generated by a diagram, via its monomial partial maps.

    Over F_2 each map becomes a bitmask and the rank is computed by XOR
    elimination; other fields go through the general closure.
    """
    maps = monomial_maps(n, tg)
    if field.characteristic == 2:
        pivots: dict = {}
        for f in maps:
            v = 0
            for x, t in enumerate(f):
                if t >= 0:
                    v |= 1 << (x * n + t)
            while v:
                top = v.bit_length() - 1
                if top in pivots:
                    v ^= pivots[top]
                else:
                    pivots[top] = v
                    break
        return len(pivots)
    from .exactlin import Matrix, rank
    rows = []
    for f in maps:
        r = [0] * (n * n)
        for x, t in enumerate(f):
            if t >= 0:
                r[x * n + t] = 1
        rows.append(r)
    return rank(Matrix(field, rows, n * n))


# ---------------------------------------------------------------------------
# Configuration, enumeration and reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    gens: int
    max_verts: int
    field: FieldSpec = GF2
    budget: int = 10 ** 6
    workers: int = 1
    checkpoint: str | None = None

    def __post_init__(self):
        if self.gens < 1 or self.max_verts < 1:
            raise ValueError("need at least one generator and one vertex")
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    def to_json(self):
        return {"gens": self.gens, "maxVertices": self.max_verts, "field": str(self.field),
                "budget": self.budget, "workers": self.workers}


@dataclass
class LevelStats:
    produced: int = 0


def _load_checkpoint(cfg: SearchConfig) -> dict:
    if not cfg.checkpoint or not os.path.exists(cfg.checkpoint):
        return {}
    with open(cfg.checkpoint, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("gens") != cfg.gens:
        raise ValueError("checkpoint was written for a different generator count")
    return {int(k): (v["produced"], [tuple(tuple(r) for r in c) for c in v["codes"]])
            for k, v in data["levels"].items()}


def _save_checkpoint(cfg: SearchConfig, levels: dict):
    if not cfg.checkpoint:
        return
    data = {"gens": cfg.gens,
            "levels": {str(k): {"produced": p, "codes": [list(map(list, c)) for c in codes]}
                       for k, (p, codes) in sorted(levels.items())}}
    tmp = cfg.checkpoint + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(data, fh, separators=(",", ":"))
    os.replace(tmp, cfg.checkpoint)


def _next_level(parents, cfg: SearchConfig):
    if cfg.workers == 1 or len(parents) < 2 * cfg.workers:
        return _expand((parents, cfg.gens))
    shards = [(parents[i::cfg.workers], cfg.gens) for i in range(cfg.workers)]
    merged = set()
    produced = 0
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        for codes, count in pool.map(_expand, shards):
            merged.update(codes)
            produced += count
    return sorted(merged), produced


def enumerate_levels(cfg: SearchConfig) -> Iterator[tuple[int, int, list]]:
    """Yield (n, candidates produced, sorted canonical codes) for n = 1..max_verts."""
    levels = _load_checkpoint(cfg)
    if 1 not in levels:
        levels[1] = (1, [single_vertex_code(cfg.gens)])
    for n in range(1, cfg.max_verts + 1):
        if n not in levels:
            codes, produced = _next_level(levels[n - 1][1], cfg)
            levels[n] = (produced, codes)
            _save_checkpoint(cfg, levels)
        yield n, levels[n][0], levels[n][1]


def enumerate_diagrams(cfg: SearchConfig):
    """One diagram per isomorphism class with at most max_verts vertices.

    Raises :class:`BudgetExceeded` once more than ``cfg.budget`` classes
    would be produced; the diagrams yielded before that form a deterministic prefix.
    """
    count = 0
    for n, _, codes in enumerate_levels(cfg):
        for code in codes:
            count += 1
            if count > cfg.budget:
                raise BudgetExceeded(f"class budget of {cfg.budget} exhausted at {n} vertices",
                                     partial=count - 1)
            yield code_to_diagram(code, cfg.field)


@dataclass
class Witness:
    value: Fraction
    dimM: int
    dimA: int
    cdg: str
    generatorCounts: dict
    code: tuple = dc_field(repr=False, default=())

    def to_json(self):
        v = self.value
        return {"value": int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}",
                "dimM": self.dimM, "dimA": self.dimA, "cdg": self.cdg,
                "generatorCounts": self.generatorCounts}


@dataclass
class SearchReport:
    config: dict
    candidatesEnumerated: int
    candidatesRealized: int
    countsBySize: dict
    bestExcess: Witness | None
    bestRatio: Witness | None
    exhaustive: bool
    flaggedFindings: list
    scope: str = SCOPE

    def to_json(self) -> dict:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "kind": "SearchReport",
            "config": self.config,
            "candidatesEnumerated": self.candidatesEnumerated,
            "candidatesRealized": self.candidatesRealized,
            "countsBySize": {str(k): v for k, v in sorted(self.countsBySize.items())},
            "bestExcess": self.bestExcess.to_json() if self.bestExcess else None,
            "bestRatio": self.bestRatio.to_json() if self.bestRatio else None,
            "exhaustive": self.exhaustive,
            "flaggedFindings": self.flaggedFindings,
            "scope": self.scope,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def _witness(value, n, dimA, code, field):
    from .diagrams import generator_counts, serialize
    d = code_to_diagram(code, field)
    return Witness(value, n, dimA, serialize(d), generator_counts(d), code)


def run_search(cfg: SearchConfig) -> SearchReport:
    """Realise every canonical diagram and track the extremes of dim A - dim M and dim A / dim M.

    Ties are broken by fewest vertices, then fewest edges, then smallest
    canonical code, so the recorded witness is the simplest one found.
    """
    counts: dict = {}
    produced_total = 0
    realized = 0
    best_ex = best_ra = None  # (value, key)
    exhaustive = True
    try:
        for n, produced, codes in enumerate_levels(cfg):
            produced_total += produced
            for code in codes:
                if realized >= cfg.budget:
                    raise BudgetExceeded("class budget exhausted")
                realized += 1
                counts[n] = counts.get(n, 0) + 1
                dimA = diagram_algebra_dim(n, code_to_tg(code), cfg.field)
                ex = dimA - n
                ra = Fraction(dimA, n)
                key = (n, sum(1 for row in code for t in row if t < n), code)
                if best_ex is None or ex > best_ex[0] or (ex == best_ex[0] and key < best_ex[1]):
                    best_ex = (ex, key, dimA)
                if best_ra is None or ra > best_ra[0] or (ra == best_ra[0] and key < best_ra[1]):
                    best_ra = (ra, key, dimA)
    except BudgetExceeded:
        exhaustive = False
    wex = _witness(Fraction(best_ex[0]), best_ex[1][0], best_ex[2], best_ex[1][2], cfg.field)
    wra = _witness(best_ra[0], best_ra[1][0], best_ra[2], best_ra[1][2], cfg.field)
    flagged = []
    if wex.value > 0 and cfg.gens == 3:
        flagged.append({
            "finding": "three-generator diagram with dim A > dim M",
            "excess": int(wex.value),
            "cdg": wex.cdg,
            "generatorCounts": wex.generatorCounts,
            "note": "every such witness must need at least 4 generators over each k[g]",
        })
    cfg_json = cfg.to_json()
    cfg_json.pop("workers")
    return SearchReport(cfg_json, produced_total, realized, counts, wex, wra, exhaustive, flagged)


def validate_witness(w: dict) -> bool:
    """Re-parse a witness, check it commutes and that its dimensions are exact."""
    from .algebra import generate_algebra
    from .diagrams import parallelogram_lint, parse_diagram, realize
    d = parse_diagram(w["cdg"])
    if parallelogram_lint(d):
        return False
    ga = generate_algebra(realize(d))
    return d.dim == w["dimM"] and ga.dim == w["dimA"]


def load_report(path) -> dict:
    """Load a report, re-validating its witnesses."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("schemaVersion") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schemaVersion {data.get('schemaVersion')!r}")
    for key in ("bestExcess", "bestRatio"):
        if data.get(key) and not validate_witness(data[key]):
            raise ValueError(f"witness {key} does not re-validate")
    return data
