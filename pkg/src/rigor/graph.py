"""Simple graphs on vertices ``0..n-1``, the G(n, p) sampler, and small
combinatorial routines (matchings between vertex sets, degree peeling,
simplicial vertices).

Adjacency is kept as one Python-int bitset per vertex. Vertex sets passed in
and returned are ``frozenset``s. Ties are always broken toward the lowest
index.
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Iterable

import numpy as np

from .rng import RngStream

# below this edge probability the sampler skips geometrically between pairs
GEOMETRIC_CUTOFF = 0.1


def pair_index(u: int, v: int) -> int:
    """Position of the pair {u, v} in the colex order (0,1), (0,2), (1,2), (0,3), ..."""
    if u > v:
        u, v = v, u
    return v * (v - 1) // 2 + u


def pairs_from_index(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`pair_index`, vectorized."""
    k = np.asarray(k, dtype=np.int64)
    v = ((1 + np.sqrt(1 + 8 * k.astype(np.float64))) // 2).astype(np.int64)
    # float rounding can be off by one either way for large k
    v = np.where(v * (v - 1) // 2 > k, v - 1, v)
    v = np.where((v + 1) * v // 2 <= k, v + 1, v)
    return k - v * (v - 1) // 2, v


def _bits(s: int) -> list[int]:
    out = []
    while s:
        low = s & -s
        out.append(low.bit_length() - 1)
        s ^= low
    return out


def _mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class Graph:
    """Immutable simple graph.

    ``edges`` is the sorted tuple of pairs ``(u, v)`` with ``u < v``.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        norm = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            pair = (u, v) if u < v else (v, u)
            if pair in norm:
                raise ValueError(f"duplicate edge {pair}")
            norm.add(pair)
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(norm))

    @classmethod
    def _from_sorted_array(cls, n: int, arr: np.ndarray) -> "Graph":
        g = cls.__new__(cls)
        g.n = n
        g.edges = tuple(map(tuple, arr.tolist()))
        g.__dict__["edge_array"] = arr
        return g

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, ((u, v) for v in range(n) for u in range(v)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def star(cls, n: int) -> "Graph":
        return cls(n, ((0, i) for i in range(1, n)))

    @classmethod
    def from_adjacency(cls, adj: list[int]) -> "Graph":
        return cls(len(adj), ((u, v) for v in range(len(adj)) for u in _bits(adj[v]) if u < v))

    @cached_property
    def edge_array(self) -> np.ndarray:
        if not self.edges:
            return np.zeros((0, 2), np.int64)
        return np.array(self.edges, dtype=np.int64)

    @cached_property
    def adj(self) -> tuple[int, ...]:
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return tuple(adj)

    @cached_property
    def degrees(self) -> np.ndarray:
        e = self.edge_array
        return np.bincount(e.ravel(), minlength=self.n).astype(np.int64)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return _bits(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and bool(self.adj[u] >> v & 1)

    def is_clique(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        want = _mask(vs)
        return all((self.adj[v] | (1 << v)) & want == want for v in vs)

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Subgraph on ``vertices`` with the original labels kept (other vertices isolated)."""
        keep = _mask(vertices)
        return Graph(self.n, ((u, v) for u, v in self.edges if keep >> u & 1 and keep >> v & 1))

    def components(self) -> list[frozenset[int]]:
        seen = 0
        out = []
        for s in range(self.n):
            if seen >> s & 1:
                continue
            comp = frontier = 1 << s
            while frontier:
                nxt = 0
                for v in _bits(frontier):
                    nxt |= self.adj[v]
                frontier = nxt & ~comp
                comp |= frontier
            seen |= comp
            out.append(frozenset(_bits(comp)))
        return out

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def gnp_sample(n: int, p: float, rng: RngStream) -> Graph:
    """Erdős–Rényi G(n, p) driven by ``rng``.

    Pairs are visited in :func:`pair_index` order. For p < 0.1 the gap to the
    next edge is drawn geometrically (one uniform per edge, plus one to run off
    the end); otherwise each pair consumes one uniform.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"edge probability {p} outside [0, 1]")
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return Graph(n)
    if p >= GEOMETRIC_CUTOFF:
        keep = np.flatnonzero(rng.uniform(total) < p)
    else:
        keep = _geometric_positions(total, p, rng)
    u, v = pairs_from_index(keep)
    arr = np.stack([u, v], axis=1)
    arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
    return Graph._from_sorted_array(n, arr)


def _geometric_positions(total: int, p: float, rng: RngStream) -> np.ndarray:
    log_q = math.log1p(-p)
    chunk = max(64, int(total * p * 1.1) + 64)
    pieces = []
    pos = -1
    while True:
        start = rng.counter
        u = (rng.peek_u64(start, chunk) >> np.uint64(11)) + np.uint64(1)
        gaps = np.floor(np.log(u * (1.0 / (1 << 53))) / log_q).astype(np.int64) + 1
        steps = pos + np.cumsum(gaps)
        over = np.flatnonzero(steps >= total)
        if over.size:
            used = int(over[0]) + 1
            pieces.append(steps[: used - 1])
            rng.counter = start + used
            break
        pieces.append(steps)
        pos = int(steps[-1])
        rng.counter = start + chunk
    return np.concatenate(pieces) if pieces else np.zeros(0, np.int64)


def min_degree(g: Graph) -> int:
    if g.n == 0:
        return 0
    return int(g.degrees.min())


def greedy_matching(g: Graph, a: Iterable[int], b: Iterable[int]) -> list[tuple[int, int]]:
    """Greedy maximal matching between disjoint sets ``a`` and ``b``.

    Edges are scanned in lexicographic order; each returned pair is
    ``(x, y)`` with ``x`` in ``a`` and ``y`` in ``b``.
    """
    sa, sb = frozenset(a), frozenset(b)
    if sa & sb:
        raise ValueError("vertex sets must be disjoint")
    used: set[int] = set()
    out = []
    for u, v in g.edges:
        if u in used or v in used:
            continue
        if u in sa and v in sb:
            out.append((u, v))
        elif u in sb and v in sa:
            out.append((v, u))
        else:
            continue
        used.update((u, v))
    return out


def peel_to_min_degree(g: Graph, threshold: float,
                       within: Iterable[int] | None = None) -> frozenset[int]:
    """Largest vertex set whose induced minimum degree is at least ``threshold``.

    Vertices of internal degree below the threshold are removed one at a time,
    lowest index first. The survivor set does not depend on the order.
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    alive = _mask(range(g.n)) if within is None else _mask(within)
    deg = {v: (g.adj[v] & alive).bit_count() for v in _bits(alive)}
    while True:
        low = next((v for v in sorted(deg) if deg[v] < threshold), None)
        if low is None:
            return frozenset(deg)
        alive &= ~(1 << low)
        del deg[low]
        for w in _bits(g.adj[low] & alive):
            deg[w] -= 1


def simplicial_vertices(g: Graph, within: Iterable[int] | None = None) -> list[int]:
    """Vertices whose neighbourhood (inside ``within``) induces a clique."""
    alive = _mask(range(g.n)) if within is None else _mask(within)
    out = []
    for v in _bits(alive):
        nb = g.adj[v] & alive
        if all((g.adj[u] | (1 << u)) & nb == nb for u in _bits(nb)):
            out.append(v)
    return out


def simplicial_vertex(g: Graph) -> int | None:
    """Lowest-index vertex whose neighbours form a clique, or None."""
    found = simplicial_vertices(g)
    return found[0] if found else None


def graph_from_mask_pairs(n: int, member: np.ndarray) -> Graph:
    """Graph whose edges are the pairs flagged in a colex-indexed bitmap."""
    u, v = pairs_from_index(np.flatnonzero(member))
    arr = np.stack([u, v], axis=1)
    arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
    return Graph._from_sorted_array(n, arr)
