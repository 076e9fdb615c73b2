import json
import re
from math import factorial

import numpy as np
import pytest

from cayleygrowth.bfs import growth
from cayleygrowth.catalog import catalog
from cayleygrowth.graph import make_graph
from cayleygrowth.perm import (
    GeneratorSet,
    conjugate,
    cycles,
    generator_set,
    identity,
    is_involution,
    parse_cycles,
    random_permutation,
)
from cayleygrowth.search import (
    PermTable,
    dot_export,
    koltsov3,
    max_diameter_search,
    pattern_tag,
    sheveleva2,
    support_graph,
    whiskers_classify,
)


def test_koltsov3_example():
    gs = koltsov3(6, type=2, k=0)
    assert gs["S"] == parse_cycles("(03)(12)", 6)
    assert gs["I"] == parse_cycles("(01)(23)(45)", 6)
    assert gs["K"] == parse_cycles("(12)(34)", 6)
    assert gs.declared_inverse_closed
    assert all(is_involution(p) for p in gs.perms)


def test_koltsov3_type1_matches_literal_triple():
    gs = koltsov3(6, type=1, k=4, d=1)
    literal = {parse_cycles(c, 6) for c in ("(01)(23)(45)", "(45)", "(12)(34)")}
    assert set(gs.perms) == literal
    assert growth(make_graph(gs)).diameter == 16


@pytest.mark.parametrize("args", [(6, 2, 3), (6, 1, 5, 1), (6, 3, 0), (5, 1, -1, 1)])
def test_koltsov3_range_errors(args):
    with pytest.raises(ValueError):
        koltsov3(*args)


@pytest.mark.parametrize("n,k", [(5, 1), (6, 2), (8, 2), (8, 3), (9, 3), (10, 7)])
def test_sheveleva2_shape(n, k):
    gs = sheveleva2(n, k)
    a, s = gs["A"], gs["S"]
    assert is_involution(a)
    assert [len(c) for c in cycles(s) if len(c) > 2] == [4]
    assert all(len(c) == 2 for c in cycles(s) if len(c) != 4)


@pytest.mark.parametrize("bad", [0, 6])
def test_sheveleva2_range(bad):
    with pytest.raises(ValueError):
        sheveleva2(8, bad)


@pytest.mark.parametrize("gs", [sheveleva2(8, 2), sheveleva2(9, 3), koltsov3(6, 1, 4, 1),
                                koltsov3(7, 2, 1), koltsov3(9, 1, 0, 1)])
def test_table_constructions_generate_sn(gs):
    assert growth(make_graph(gs)).reachable == factorial(gs.degree)


def test_sheveleva2_8_3_is_square_with_whiskers():
    assert whiskers_classify(sheveleva2(8, 3)).is_square_with_whiskers


def test_coxeter_support_is_a_path():
    r = whiskers_classify(catalog("coxeter", 6))
    assert r.connected and not r.unicyclic and not r.is_square_with_whiskers
    assert pattern_tag(catalog("coxeter", 6)) == "tree"


def test_koltsov3_7_2_2_square():
    r = whiskers_classify(koltsov3(7, type=2, k=2))
    assert r.cycle_length == 4 and r.is_square_with_whiskers


def test_disconnected_support():
    gs = generator_set("d", [parse_cycles("(01)", 5), parse_cycles("(34)", 5)])
    assert not whiskers_classify(gs).connected
    assert pattern_tag(gs) == "disconnected"


def test_support_edges_per_colour():
    sg = support_graph(koltsov3(9, 2, 1))
    for label in sg.labels:
        ends = [v for u, w, lab, _ in sg.edges if lab == label for v in (u, w)]
        assert len(ends) == len(set(ends))


def _dot_counts(text):
    nodes = re.findall(r"^\s+(\d+);$", text, re.M)
    edges = re.findall(r"^\s+\d+ -[->] \d+ \[", text, re.M)
    colours = set(re.findall(r'color="(\w+)"', text))
    return len(nodes), len(edges), len(colours)


def test_dot_identity_only():
    text = dot_export(GeneratorSet("e", 4, ()))
    assert _dot_counts(text) == (4, 0, 0)


def test_dot_koltsov3_12():
    # I: 6 pairs, K: 5 pairs, S: 2 pairs
    assert _dot_counts(dot_export(koltsov3(12, 2, 3))) == (12, 13, 3)


@pytest.mark.parametrize("gs", [sheveleva2(9, 2), koltsov3(10, 2, 4), catalog("lx", 6)])
def test_dot_round_trip_counts(gs):
    sg = support_graph(gs)
    nodes, edges, colours = _dot_counts(dot_export(sg))
    assert (nodes, edges, colours) == (sg.n, len(sg.edges), len(set(lab for *_, lab, _ in sg.edges)))


def test_dot_directed_for_non_involutions():
    text = dot_export(catalog("lx", 5))
    assert text.startswith("digraph") and "dir=none" in text


def test_perm_table_matches_engine():
    table = PermTable(6)
    for name in ("lx", "lrx", "pancake"):
        gs = catalog(name, 6)
        assert table.growth(gs.perms) == growth(make_graph(gs)).layer_sizes


@pytest.mark.parametrize("n", [5, 6, 7])
def test_conjugation_invariance(n):
    rng = np.random.default_rng(n)
    table = PermTable(n)
    for _ in range(100 if n < 7 else 20):
        gens = [random_permutation(n, rng) for _ in range(2)]
        if any(g == identity(n) for g in gens):
            continue
        h = random_permutation(n, rng)
        assert table.growth(gens) == table.growth([conjugate(g, h) for g in gens])


def test_search_n5_undirected():
    out = max_diameter_search(5, directed=False)
    assert out.complete and out.max_diameter == 10
    assert all(r.has_involution() for r in out.maxima())
    assert all(r.group_order in (120, 60) for r in out.records)


def test_search_n5_directed():
    out = max_diameter_search(5, directed=True)
    assert out.max_diameter == 14
    pair = {parse_cycles("(01)(23)", 5), parse_cycles("(0314)", 5)}
    assert any(set(r.generators.perms) == pair for r in out.maxima())
    assert PermTable(5).growth(sorted(pair)).__len__() - 1 == 14


def test_search_records_sorted_and_json():
    out = max_diameter_search(4, directed=True, keep=5)
    diams = [r.diameter for r in out.records]
    assert diams == sorted(diams, reverse=True)
    row = json.loads(out.records[0].to_json())
    assert row["diameter"] == out.max_diameter and row["directed"]


def test_random_search_deterministic():
    a = max_diameter_search(6, directed=True, mode="random", budget=300, seed=3)
    b = max_diameter_search(6, directed=True, mode="random", budget=300, seed=3)
    assert [r.to_json() for r in a.records] == [r.to_json() for r in b.records]
    assert a.evaluated == 300


def test_budget_flags_partial():
    out = max_diameter_search(5, directed=True, budget=50)
    assert not out.complete and out.evaluated == 50


def test_thread_count_independent():
    one = max_diameter_search(5, directed=False)
    two = max_diameter_search(5, directed=False, n_jobs=3)
    assert [r.to_json() for r in one.records] == [r.to_json() for r in two.records]


def test_search_limits():
    with pytest.raises(ValueError):
        max_diameter_search(8, mode="exhaustive")
    with pytest.raises(ValueError):
        max_diameter_search(5, pair_count=3)
