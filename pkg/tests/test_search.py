import functools
import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from commat.algebra import generate_algebra
from commat.diagrams import bundled, parallelogram_lint, realize
from commat.errors import BudgetExceeded
from commat.exactlin import GF2, QQ
from commat.search import (SearchConfig, canonical_code, canonical_form, code_to_diagram,
                           code_to_tg, diagram_algebra_dim, diagram_to_tg, enumerate_diagrams,
                           enumerate_levels, load_report, run_search)


def _acyclic(f):
    n = len(f)
    for s in range(n):
        v, steps = s, 0
        while v >= 0:
            v = f[v]
            steps += 1
            if steps > n:
                return False
    return True


def naive_class_count(g: int, n: int) -> int:
    """Labelled commuting diagrams on n vertices, deduplicated by trying every relabelling."""
    maps = [f for f in itertools.product(range(-1, n), repeat=n) if _acyclic(f)]
    seen = set()
    perms_v = list(itertools.permutations(range(n)))
    perms_g = list(itertools.permutations(range(g)))
    classes = 0
    for tg in itertools.product(maps, repeat=g):
        ok = all(
            (tg[h2][tg[h1][v]] if tg[h1][v] >= 0 else -1) == (tg[h1][tg[h2][v]] if tg[h2][v] >= 0 else -1)
            for v in range(n) for h1 in range(g) for h2 in range(h1 + 1, g))
        if not ok or tg in seen:
            continue
        classes += 1
        for pv in perms_v:
            for pg in perms_g:
                # vertex v becomes pv[v]; generator h becomes pg[h]
                new = [None] * g
                for h in range(g):
                    row = [-1] * n
                    for v in range(n):
                        t = tg[h][v]
                        row[pv[v]] = pv[t] if t >= 0 else -1
                    new[pg[h]] = tuple(row)
                seen.add(tuple(new))
    return classes


@pytest.mark.parametrize("g,n", [(1, 2), (1, 3), (2, 2), (1, 4), (2, 3), (3, 2), (3, 3)])
def test_class_counts_match_naive_oracle(g, n):
    counts = {k: len(codes) for k, _, codes in enumerate_levels(SearchConfig(g, n))}
    assert counts[n] == naive_class_count(g, n)


@functools.lru_cache(maxsize=None)
def level_codes(g, n):
    return next(c for k, _, c in enumerate_levels(SearchConfig(g, n)) if k == n)


@st.composite
def relabelled(draw):
    g = draw(st.integers(1, 3))
    n = draw(st.integers(1, 5))
    codes = level_codes(g, n)
    code = draw(st.sampled_from(codes))
    tg = code_to_tg(code)
    pv = draw(st.permutations(range(n)))
    pg = draw(st.permutations(range(g)))
    new = [None] * g
    for h in range(g):
        row = [-1] * n
        for v in range(n):
            t = tg[h][v]
            row[pv[v]] = pv[t] if t >= 0 else -1
        new[pg[h]] = row
    return code, n, g, new


@settings(max_examples=150, deadline=None)
@given(relabelled())
def test_canonical_form_is_invariant(data):
    code, n, g, tg = data
    assert canonical_form(n, g, tg) == code


def test_canonical_code_of_diagram():
    d = bundled("d4gen")
    n, g, tg = diagram_to_tg(d)
    assert canonical_code(d) == canonical_form(n, g, tg)
    again = code_to_diagram(canonical_code(d))
    assert canonical_code(again) == canonical_code(d)
    assert parallelogram_lint(again) == []


@pytest.mark.parametrize("g,n", [(2, 4), (3, 4), (4, 3)])
def test_fast_dimension_matches_closure(g, n):
    for d in enumerate_diagrams(SearchConfig(g, n)):
        _, _, tg = diagram_to_tg(d)
        assert diagram_algebra_dim(d.dim, tg, GF2) == generate_algebra(realize(d)).dim


def test_fast_dimension_over_rationals():
    for d in itertools.islice(enumerate_diagrams(SearchConfig(3, 4, field=QQ)), 60):
        _, _, tg = diagram_to_tg(d)
        assert diagram_algebra_dim(d.dim, tg, QQ) == generate_algebra(realize(d)).dim


def test_budget_truncates_deterministically():
    cfg = SearchConfig(2, 5, budget=40)
    with pytest.raises(BudgetExceeded):
        list(enumerate_diagrams(cfg))
    first = [canonical_code(d) for d in itertools.islice(enumerate_diagrams(cfg), 40)]
    second = [canonical_code(d) for d in itertools.islice(enumerate_diagrams(cfg), 40)]
    assert first == second
    rep = run_search(cfg)
    assert not rep.exhaustive and rep.candidatesRealized == 40


def test_four_generators_rediscover_matrix_units():
    rep = run_search(SearchConfig(4, 4))
    assert rep.exhaustive
    assert rep.bestExcess.value == 1
    assert rep.bestExcess.code == canonical_code(bundled("d4gen"))
    assert rep.bestRatio.value >= 1.25
    assert rep.bestExcess.generatorCounts == {"a": 3, "b": 3, "c": 3, "d": 3}


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_two_generators_never_exceed(n):
    rep = run_search(SearchConfig(2, n))
    assert rep.exhaustive and rep.bestExcess.value <= 0


def test_workers_do_not_change_output():
    one = run_search(SearchConfig(3, 4)).dumps()
    two = run_search(SearchConfig(3, 4, workers=2)).dumps()
    assert one == two


def test_checkpoint_resume(tmp_path):
    ck = tmp_path / "ck.json"
    full = run_search(SearchConfig(2, 5)).dumps()
    run_search(SearchConfig(2, 4, checkpoint=str(ck)))
    data = json.loads(ck.read_text())
    assert sorted(data["levels"]) == ["1", "2", "3", "4"]
    resumed = run_search(SearchConfig(2, 5, checkpoint=str(ck))).dumps()
    assert resumed == full
    assert "5" in json.loads(ck.read_text())["levels"]


def test_report_round_trip_and_validation(tmp_path):
    rep = run_search(SearchConfig(4, 4))
    path = tmp_path / "rep.json"
    path.write_text(rep.dumps())
    data = load_report(path)
    assert data["bestExcess"]["value"] == 1
    assert data["schemaVersion"] == 1
    data["bestExcess"]["dimA"] = 6
    path.write_text(json.dumps(data))
    with pytest.raises(ValueError):
        load_report(path)


def test_witness_generator_counts_reported():
    rep = run_search(SearchConfig(3, 4))
    assert set(rep.bestExcess.generatorCounts) == {"a", "b", "c"}
    assert rep.flaggedFindings == []
    assert "diagram" in rep.scope
