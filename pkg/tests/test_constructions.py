import json
import random
from itertools import combinations
from math import comb

import pytest

from rigor.constructions import (BootstrapError, HennebergError, HennebergStep, bootstrap_clique,
                                 build_matching_gadget, henneberg_apply, one_step, zero_step)
from rigor.graph import Graph, gnp_sample
from rigor.rigidity import closure, is_d_rigid, rigidity_rank
from rigor.rng import RngStream, derive_seed

from oracles import oracle_rigidity_rank, random_edges


def k_minus_edge(k):
    return Graph(k, [e for e in combinations(range(k), 2) if e != (0, 1)])


# -- Henneberg steps ---------------------------------------------------------

def test_zero_step_on_triangle():
    g = henneberg_apply(Graph.complete(3), 2, zero_step(Graph.complete(3), [0, 2]))
    assert g.n == 4 and g.m == 5
    assert is_d_rigid(g, 2)


def test_one_step_on_k4():
    k4 = Graph.complete(4)
    g = henneberg_apply(k4, 2, one_step(k4, [1, 3, 0]))
    # K_4 already carries one redundant edge in the plane: 6 - 1 + 3 edges, rank 2*5 - 3
    assert g.n == 5 and g.m == 8
    assert not g.has_edge(1, 3)
    assert oracle_rigidity_rank(g.n, 2, g.edges, seed=1) == 7
    assert is_d_rigid(g, 2)


def test_malformed_steps_rejected():
    k4 = Graph.complete(4)
    with pytest.raises(HennebergError):
        henneberg_apply(k4, 2, zero_step(k4, [0, 1, 2]))
    with pytest.raises(HennebergError):
        henneberg_apply(k4, 2, one_step(k4, [0, 1]))
    with pytest.raises(HennebergError):
        henneberg_apply(k4, 2, HennebergStep(0, 7, (0, 1)))
    with pytest.raises(HennebergError):
        henneberg_apply(k4, 2, HennebergStep(0, 4, (0, 0)))
    p = Graph.path(4)
    with pytest.raises(HennebergError):
        henneberg_apply(p, 2, one_step(p, [0, 2, 3]))  # 0 and 2 are not adjacent
    with pytest.raises(HennebergError):
        henneberg_apply(k4, 2, HennebergStep(1, 4, (0, 1, 2), (1, 2)))
    with pytest.raises(HennebergError):
        henneberg_apply(k4, 2, HennebergStep(2, 4, (0, 1)))


def _random_step(rnd, g, d):
    if rnd.random() < 0.5 or g.m == 0:
        return zero_step(g, rnd.sample(range(g.n), d))
    u, v = rnd.choice(g.edges)
    others = rnd.sample([w for w in range(g.n) if w not in (u, v)], d - 1)
    return one_step(g, [u, v] + others)


@pytest.mark.parametrize("seed", range(100))
def test_henneberg_steps_preserve_rigidity(seed):
    rnd = random.Random(seed)
    d = rnd.randint(1, 3)
    g = Graph.complete(d + 1)
    while g.n < rnd.randint(d + 2, 12):
        g = henneberg_apply(g, d, _random_step(rnd, g, d))
        assert is_d_rigid(g, d, seed=seed)
        assert g.m == d * g.n - comb(d + 1, 2)


# -- matching gadget -----------------------------------------------------------

def test_gadget_d1():
    gad = build_matching_gadget(1)
    assert gad.graph.n == 2 and gad.graph.edges == ((0, 1),)


@pytest.mark.parametrize("d", range(1, 6))
def test_gadget_structure(d):
    gad = build_matching_gadget(d)
    g = gad.graph
    b = comb(d + 1, 2)
    assert g.n == d * (d + 1)
    cross = gad.cross_edges()
    assert len(cross) == b
    assert sorted(cross) == [(k, b + k) for k in range(b)]
    ends = [x for e in cross for x in e]
    assert len(set(ends)) == 2 * b
    assert g.m == d * g.n - comb(d + 1, 2)


@pytest.mark.parametrize("d", range(1, 6))
def test_gadget_is_rigid(d):
    g = build_matching_gadget(d).graph
    target = d * g.n - comb(d + 1, 2)
    if d <= 3:
        assert oracle_rigidity_rank(g.n, d, g.edges, seed=d) == target
    assert rigidity_rank(g, d, seed=d) == target


def test_gadget_rejects_zero():
    with pytest.raises(ValueError):
        build_matching_gadget(0)


# -- bootstrap ---------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_bootstrap_complete(n):
    log = bootstrap_clique(Graph.complete(n), 2)
    assert log.success and log.clique == frozenset(range(n))


@pytest.mark.parametrize("d", range(1, 7))
def test_bootstrap_complete_minus_edge(d):
    log = bootstrap_clique(k_minus_edge(d + 2), d)
    assert log.success and log.clique == frozenset(range(d + 2))


def test_bootstrap_stops_after_maximal_start_on_exact_closures():
    # the starting clique is maximal in a closed graph, so neither growth rule can fire
    rnd = random.Random(2)
    for s in range(40):
        n = rnd.randint(5, 20)
        g = Graph(n, random_edges(n, rnd.uniform(0.2, 0.7), rnd))
        log = bootstrap_clique(g, rnd.randint(1, 3), seed=s)
        kinds = [e["event"] for e in log.events]
        assert kinds in (["Init"], ["Init", "Stuck"])


def _report_with_members(g, d, member_edges):
    rep = closure(g, d)
    rep.member[:] = False
    for u, v in member_edges:
        rep.member[u + v * (v - 1) // 2] = True
    return rep


def test_bootstrap_merge_rule_runs_on_supplied_report():
    # two triangles joined by a perfect matching; not closed, so the merge must trip the check
    tri = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]
    match = [(0, 3), (1, 4), (2, 5)]
    g = Graph(6, tri + match)
    rep = _report_with_members(g, 2, tri + match)
    with pytest.raises(BootstrapError):
        bootstrap_clique(g, 2, report=rep)


def test_bootstrap_disconnected_is_stuck():
    g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    log = bootstrap_clique(g, 1)
    assert not log.success
    assert log.events[-1]["event"] == "Stuck"
    assert log.clique in (frozenset({0, 1, 2}), frozenset({3, 4, 5}))


def test_bootstrap_log_json_roundtrip():
    log = bootstrap_clique(Graph.path(4), 1)
    data = json.loads(log.to_json())
    assert data["success"] is True
    assert data["final_clique"] == [0, 1, 2, 3]
    assert data["events"][0]["event"] == "Init"


def test_bootstrap_rejects_bad_arguments():
    with pytest.raises(ValueError):
        bootstrap_clique(Graph.complete(3), 0)
    with pytest.raises(ValueError):
        bootstrap_clique(Graph.complete(3), 1, match_in="elsewhere")


def test_bootstrap_detects_corrupt_closure():
    # K_4 minus an edge; a correct planar closure would contain the missing pair
    g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
    assert closure(g, 2).is_member(2, 3)
    rep = _report_with_members(g, 2, g.edges)
    with pytest.raises(BootstrapError):
        bootstrap_clique(g, 2, report=rep)


@pytest.mark.parametrize("match_in", ["closure", "graph"])
def test_bootstrap_soundness_on_random_graphs(match_in):
    rnd = random.Random(7)
    wins = 0
    for s in range(60):
        n = rnd.randint(4, 25)
        d = rnd.randint(1, 3)
        g = Graph(n, random_edges(n, rnd.uniform(0.3, 0.9), rnd))
        log = bootstrap_clique(g, d, seed=s, match_in=match_in)
        if log.success:
            wins += 1
            assert is_d_rigid(g, d, seed=s + 1)
        else:
            assert log.events[-1]["event"] == "Stuck"
    assert wins > 10


def test_bootstrap_on_random_graph_with_merges():
    n = 60
    g = gnp_sample(n, 0.5, RngStream(derive_seed(4, "b")))
    log = bootstrap_clique(g, 4, seed=1)
    assert log.success
    assert is_d_rigid(g, 4)
