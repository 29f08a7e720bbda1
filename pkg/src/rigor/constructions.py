"""Rigidity-preserving constructions.

* Henneberg 0-steps (new vertex on ``d`` old ones) and 1-steps (new vertex on
  ``d + 1`` old ones, the first two adjacent, then that edge removed).
* The matching gadget: a d-rigid graph on ``d(d+1)`` vertices whose edges
  between its two halves form a perfect matching of size ``C(d+1, 2)``.
* A clique-growing certifier working inside the d-rigidity closure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb

from .graph import (Graph, greedy_matching, peel_to_min_degree, simplicial_vertices)
from .rigidity import DEFAULT_SEED, ClosureReport, Embedding, closure


class HennebergError(ValueError):
    """A step that does not fit the graph it is applied to."""


class BootstrapError(AssertionError):
    """The growing set stopped being a clique of the closure.

    Either a bug or a randomized-rank false positive.
    """


@dataclass(frozen=True)
class HennebergStep:
    kind: int
    new_vertex: int
    targets: tuple[int, ...]
    removed_edge: tuple[int, int] | None = None


def henneberg_apply(g: Graph, d: int, step: HennebergStep) -> Graph:
    """Grow ``g`` by one vertex; the new vertex must be ``g.n``."""
    targets = tuple(int(t) for t in step.targets)
    if step.new_vertex != g.n:
        raise HennebergError(f"new vertex must be {g.n}, got {step.new_vertex}")
    if len(set(targets)) != len(targets) or any(not 0 <= t < g.n for t in targets):
        raise HennebergError("targets must be distinct existing vertices")
    edges = list(g.edges)
    if step.kind == 0:
        if len(targets) != d:
            raise HennebergError(f"a 0-step attaches to exactly {d} vertices")
        if step.removed_edge is not None:
            raise HennebergError("a 0-step removes no edge")
    elif step.kind == 1:
        if len(targets) != d + 1:
            raise HennebergError(f"a 1-step attaches to exactly {d + 1} vertices")
        x1, x2 = targets[0], targets[1]
        removed = (min(x1, x2), max(x1, x2))
        if step.removed_edge is None or tuple(sorted(step.removed_edge)) != removed:
            raise HennebergError("the removed edge must join the first two targets")
        if not g.has_edge(x1, x2):
            raise HennebergError(f"edge {removed} is not present")
        edges.remove(removed)
    else:
        raise HennebergError(f"unknown step kind {step.kind}")
    edges.extend((t, g.n) for t in targets)
    return Graph(g.n + 1, edges)


def zero_step(g: Graph, targets) -> HennebergStep:
    return HennebergStep(0, g.n, tuple(targets))


def one_step(g: Graph, targets) -> HennebergStep:
    t = tuple(targets)
    return HennebergStep(1, g.n, t, (min(t[0], t[1]), max(t[0], t[1])))


@dataclass
class MatchingGadget:
    """``graph`` has left half ``0..B-1`` and right half ``B..2B-1``, B = C(d+1, 2),
    matched by the pairs ``(k, B + k)``."""

    d: int
    graph: Graph
    trace: list[HennebergStep]
    base: Graph

    @property
    def half(self) -> int:
        return comb(self.d + 1, 2)

    @property
    def left(self) -> list[int]:
        return list(range(self.half))

    @property
    def right(self) -> list[int]:
        return list(range(self.half, 2 * self.half))

    def cross_edges(self) -> list[tuple[int, int]]:
        b = self.half
        return [(u, v) for u, v in self.graph.edges if u < b <= v]


def build_matching_gadget(d: int) -> MatchingGadget:
    """Build the gadget by Henneberg steps, then relabel x_k -> k-1, y_k -> B+k-1.

    Start from K_{d+1} on x_1..x_d, y_1; 0-step y_i onto y_1..y_{i-1}, x_i..x_d.
    Each surplus cross edge x_i y_j is replaced by two 1-steps: x_k onto
    (x_i, y_j, other x's) dropping x_i y_j, then y_k onto (x_k, y_j, other y's)
    dropping x_k y_j.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    # working labels: x_i -> i-1, y_1 -> d, later vertices appended in order
    x = {i: i - 1 for i in range(1, d + 1)}
    y = {1: d}
    base = Graph.complete(d + 1)
    g = base
    trace: list[HennebergStep] = []

    def apply(step: HennebergStep) -> None:
        nonlocal g
        trace.append(step)
        g = henneberg_apply(g, d, step)

    for i in range(2, d + 1):
        targets = [y[j] for j in range(1, i)] + [x[j] for j in range(i, d + 1)]
        y[i] = g.n
        apply(zero_step(g, targets))
    surplus = [(i, j) for j in range(1, d + 1) for i in range(j + 1, d + 1)]
    for k, (i, j) in enumerate(surplus, start=d + 1):
        x[k] = g.n
        apply(one_step(g, [x[i], y[j]] + [x[t] for t in range(1, d + 1) if t != i]))
        y[k] = g.n
        apply(one_step(g, [x[k], y[j]] + [y[t] for t in range(1, d + 1) if t != j]))
    b = comb(d + 1, 2)
    relabel = {x[k]: k - 1 for k in x} | {y[k]: b + k - 1 for k in y}
    out = Graph(2 * b, [(relabel[u], relabel[v]) for u, v in g.edges])
    return MatchingGadget(d, out, trace, base)


# -- clique bootstrap ------------------------------------------------------

@dataclass
class BootstrapLog:
    n: int
    d: int
    events: list[dict] = field(default_factory=list)
    clique: frozenset[int] = frozenset()

    @property
    def success(self) -> bool:
        return len(self.clique) == self.n

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "d": self.d, "success": self.success,
                           "events": self.events, "final_clique": sorted(self.clique)})


def _greedy_clique(g: Graph) -> frozenset[int]:
    if g.n == 0:
        return frozenset()
    start = int(max(range(g.n), key=lambda v: (g.degree(v), -v)))
    members = [start]
    for v in g.neighbors(start):
        if all(g.has_edge(v, w) for w in members):
            members.append(v)
    return frozenset(members)


def _largest_simplicial_clique(m: Graph, within: frozenset[int]) -> frozenset[int] | None:
    best = None
    for v in simplicial_vertices(m, within):
        nb = frozenset(w for w in m.neighbors(v) if w in within) | {v}
        if best is None or len(nb) > len(best):
            best = nb
    return best


def bootstrap_clique(g: Graph, d: int, seed: int = DEFAULT_SEED, *,
                     emb: Embedding | None = None, match_in: str = "closure",
                     report: ClosureReport | None = None) -> BootstrapLog:
    """Grow a clique of the closure until it covers every vertex or gets stuck.

    Growth uses two rules that keep the set a clique of a closed graph: a
    vertex with at least d closure-neighbours in the clique joins it, and a
    disjoint clique joined to it by a matching of C(d+1, 2) edges merges with
    it. ``match_in="graph"`` searches that matching in ``g`` rather than in the
    closure. Success certifies d-rigidity; getting stuck certifies nothing.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if match_in not in ("closure", "graph"):
        raise ValueError("match_in must be 'closure' or 'graph'")
    rep = report if report is not None else closure(g, d, emb, seed=seed)
    m = rep.member_graph()
    log = BootstrapLog(g.n, d)
    everything = frozenset(range(g.n))
    need = comb(d + 1, 2)

    def check(a: frozenset[int]) -> None:
        if not m.is_clique(a):
            raise BootstrapError(f"set of size {len(a)} is not a clique of the closure")

    a = _largest_simplicial_clique(m, everything) or _greedy_clique(m)
    log.events.append({"event": "Init", "clique": sorted(a)})
    check(a)
    while a != everything:
        rest = everything - a
        heavy = next((v for v in sorted(rest)
                      if sum(1 for w in m.neighbors(v) if w in a) >= d), None)
        if heavy is not None:
            a = a | {heavy}
            log.events.append({"event": "ExtendByHeavyVertex", "vertex": heavy})
            check(a)
            continue
        sub_edges = sum(1 for u, v in m.edges if u in rest and v in rest)
        if sub_edges == 0:
            log.events.append({"event": "Stuck", "reason": "no closure edges outside the clique"})
            break
        dense = peel_to_min_degree(m, sub_edges / (4 * len(rest)), within=rest)
        b = _largest_simplicial_clique(m, dense) if dense else None
        if not b:
            log.events.append({"event": "Stuck", "reason": "no simplicial vertex in the dense part"})
            break
        host = m if match_in == "closure" else g
        matching = greedy_matching(host, a, b)
        if len(matching) < need:
            log.events.append({"event": "Stuck", "reason": f"matching of size {len(matching)} < {need}",
                               "candidate": sorted(b)})
            break
        a = a | b
        log.events.append({"event": "MergeByMatching", "clique": sorted(b),
                           "matching": [list(e) for e in matching]})
        check(a)
    log.clique = a
    return log
