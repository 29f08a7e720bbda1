"""Generic rigidity through rank computations at a random point of GF(q).

The rigidity matrix row of an edge ``xy`` carries ``p(x) - p(y)`` in the ``d``
columns of ``x`` and ``p(y) - p(x)`` in those of ``y``. Coordinates are drawn
uniformly from GF(q), so the point rank equals the generic rank except with
probability at most ``rank / q``.

Error semantics are one-sided. A point rank is never above the generic rank,
so a "rigid" verdict is a certificate, and "flexible" is wrong only when the
point is degenerate. Closure membership may be granted spuriously only when a
generically nonzero residual happens to vanish.

Graphs on ``n <= d`` vertices are treated as d-rigid exactly when complete
(their generic rank is ``C(n, 2)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numba as nb
import numpy as np

from .ffield import _ZERO, MODULUS, DimensionError, RowBasis, _addmod, _mulmod, _submod
from .graph import Graph, graph_from_mask_pairs, min_degree, pair_index, pairs_from_index
from .rng import RngStream, derive_seed

DEFAULT_SEED = 20240601

# rows are built and inserted in batches of this many edges
_BATCH = 256


@dataclass(frozen=True, eq=False)
class Embedding:
    """Per-vertex coordinates in GF(q)^d."""

    n: int
    d: int
    coords: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if self.coords.shape != (self.n, self.d) or self.coords.dtype != np.uint64:
            raise DimensionError("coords must be a (n, d) uint64 array")

    @classmethod
    def random(cls, n: int, d: int, seed: int = DEFAULT_SEED) -> "Embedding":
        if d < 1:
            raise ValueError("dimension must be at least 1")
        coords = RngStream(seed).residues(n * d, MODULUS).reshape(n, d)
        return cls(n, d, coords, seed)

    @classmethod
    def from_coords(cls, coords) -> "Embedding":
        rows = [[int(x) % MODULUS for x in r] for r in coords]
        arr = np.array(rows, dtype=np.uint64).reshape(len(rows), -1)
        return cls(arr.shape[0], arr.shape[1], arr)

    def project(self, d: int) -> "Embedding":
        """The embedding that keeps only the first ``d`` coordinates."""
        if not 1 <= d <= self.d:
            raise ValueError("can only project to a smaller dimension")
        return Embedding(self.n, d, np.ascontiguousarray(self.coords[:, :d]), self.seed)


def random_embedding(n: int, d: int, seed: int = DEFAULT_SEED) -> Embedding:
    return Embedding.random(n, d, seed)


def _embedding_for(g: Graph, d: int, emb: Embedding | None, seed: int) -> Embedding:
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if emb is None:
        return Embedding.random(g.n, d, seed)
    if emb.n != g.n or emb.d != d:
        raise DimensionError(f"embedding is ({emb.n}, {emb.d}); graph needs ({g.n}, {d})")
    return emb


@nb.njit(cache=True, nogil=True)
def _fill_rows(coords, us, vs, out):
    d = coords.shape[1]
    for i in range(us.shape[0]):
        u = us[i]
        v = vs[i]
        row = out[i]
        for k in range(row.shape[0]):
            row[k] = _ZERO
        for c in range(d):
            diff = _submod(coords[u, c], coords[v, c])
            row[u * d + c] = diff
            row[v * d + c] = _submod(_ZERO, diff)


def edge_rows(edges: np.ndarray, emb: Embedding) -> np.ndarray:
    """Rigidity-matrix rows (one per edge) as an (m, d*n) uint64 matrix."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    out = np.empty((edges.shape[0], emb.n * emb.d), np.uint64)
    _fill_rows(emb.coords, edges[:, 0].copy(), edges[:, 1].copy(), out)
    return out


def edge_row(e: tuple[int, int], emb: Embedding) -> np.ndarray:
    x, y = int(e[0]), int(e[1])
    if x == y:
        raise ValueError("an edge needs two distinct endpoints")
    if not (0 <= x < emb.n and 0 <= y < emb.n):
        raise ValueError(f"vertex out of range for n={emb.n}")
    return edge_rows(np.array([[x, y]]), emb)[0]


def generic_rank_formula(n: int, d: int) -> int:
    """Rank of the rigidity matrix of K_n at a generic point in dimension d."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    if n <= d + 1:
        return n * (n - 1) // 2
    return d * n - d * (d + 1) // 2


def edge_criterion_dmax(n: int, m: int) -> int:
    """Largest d in [0, n-1] with m >= d*n - C(d+1, 2)."""
    if n <= 1:
        return 0
    # d*n - d(d+1)/2 <= m  <=>  d^2 - (2n-1)d + 2m >= 0; take the smaller root
    b = 2 * n - 1
    disc = b * b - 8 * m
    if disc < 0:
        return n - 1
    d = max(0, (b - math.isqrt(disc)) // 2)
    while d + 1 <= n - 1 and (d + 1) * n - (d + 1) * (d + 2) // 2 <= m:
        d += 1
    while d > 0 and d * n - d * (d + 1) // 2 > m:
        d -= 1
    return min(d, n - 1)


def _insertion_order(edges: np.ndarray) -> np.ndarray:
    # descending lower endpoint keeps elimination fill-in small
    if edges.shape[0] == 0:
        return edges
    order = np.lexsort((-edges[:, 1], -edges[:, 0]))
    return edges[order]


def _span_basis(edge_lists: Iterable[np.ndarray], emb: Embedding,
                stop_at: int | None = None) -> RowBasis:
    dim = emb.n * emb.d
    basis = RowBasis(dim, capacity=min(dim, 64))
    for edges in edge_lists:
        edges = _insertion_order(np.asarray(edges, np.int64).reshape(-1, 2))
        for s in range(0, edges.shape[0], _BATCH):
            if stop_at is not None and basis.rank >= stop_at:
                return basis
            basis.insert_many(edge_rows(edges[s: s + _BATCH], emb), stop_at)
    return basis


def rigidity_rank(g: Graph, d: int, emb: Embedding | None = None, *,
                  seed: int = DEFAULT_SEED, stop_at: int | None = None) -> int:
    """Rank of the rigidity matrix of ``g`` at the embedding.

    With ``stop_at`` the elimination ends as soon as that rank is reached.
    """
    emb = _embedding_for(g, d, emb, seed)
    return _span_basis([g.edge_array], emb, stop_at).rank


def best_rank(g: Graph, d: int, seed: int = DEFAULT_SEED, repeats: int = 1) -> int:
    """Maximum point rank over ``repeats`` independent embeddings."""
    target = generic_rank_formula(g.n, d)
    best = 0
    for r in range(max(1, repeats)):
        s = seed if r == 0 else derive_seed(seed, "repeat", r)
        best = max(best, rigidity_rank(g, d, seed=s, stop_at=target))
        if best == target:
            break
    return best


def _forced_flexible(g: Graph, d: int) -> bool:
    """Exact counting obstructions to d-rigidity (no linear algebra)."""
    if g.m < generic_rank_formula(g.n, d):
        return True
    # a vertex of degree < d leaves a motion whenever n >= d + 1
    return g.n >= d + 1 and min_degree(g) < d


def is_d_rigid(g: Graph, d: int, emb: Embedding | None = None, *,
               seed: int = DEFAULT_SEED, repeats: int = 1) -> bool:
    """True iff the point rank attains the generic rank of K_n.

    ``repeats`` > 1 retries flexible outcomes with fresh embeddings derived
    from ``seed`` (ignored when ``emb`` is given).
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    target = generic_rank_formula(g.n, d)
    if _forced_flexible(g, d):
        return False
    if emb is not None:
        return rigidity_rank(g, d, emb, stop_at=target) == target
    return best_rank(g, d, seed, repeats) == target


@dataclass(eq=False)
class ClosureReport:
    """Closure membership over the pairs of [n] not inside C(A, 2).

    ``member`` is a bool array indexed by :func:`~rigor.graph.pair_index`; pairs
    inside the contracted set are always False and lie outside the domain.
    """

    n: int
    d: int
    contracted: frozenset[int]
    member: np.ndarray
    base_rank: int
    embedding_seed: int | None = None

    @property
    def domain(self) -> np.ndarray:
        dom = np.ones(self.n * (self.n - 1) // 2, bool)
        a = sorted(self.contracted)
        for u, v in combinations(a, 2):
            dom[pair_index(u, v)] = False
        return dom

    @property
    def member_count(self) -> int:
        return int(self.member.sum())

    def is_member(self, u: int, v: int) -> bool:
        return bool(self.member[pair_index(u, v)])

    def members(self) -> list[tuple[int, int]]:
        return list(self.member_graph().edges)

    def member_graph(self) -> Graph:
        return graph_from_mask_pairs(self.n, self.member)

    def is_complete(self) -> bool:
        return bool(self.member[self.domain].all())


@nb.njit(cache=True, nogil=True)
def _pair_membership(coords, kern, us, vs, out):
    d = coords.shape[1]
    k = kern.shape[1]
    acc = np.zeros(k, np.uint64)
    for i in range(us.shape[0]):
        u = us[i]
        v = vs[i]
        for t in range(k):
            acc[t] = _ZERO
        for c in range(d):
            diff = _submod(coords[u, c], coords[v, c])
            if diff == _ZERO:
                continue
            ku = kern[u * d + c]
            kv = kern[v * d + c]
            for t in range(k):
                acc[t] = _addmod(acc[t], _mulmod(diff, _submod(ku[t], kv[t])))
        zero = True
        for t in range(k):
            if acc[t] != _ZERO:
                zero = False
                break
        out[i] = zero


def _membership(basis: RowBasis, emb: Embedding, full_rank: int, pair_ids: np.ndarray) -> np.ndarray:
    """Which of the given pairs have their row in the span of ``basis``."""
    if basis.rank >= full_rank:
        # the basis already spans every row of K_n
        return np.ones(pair_ids.shape[0], bool)
    us, vs = pairs_from_index(pair_ids)
    out = np.zeros(pair_ids.shape[0], bool)
    _pair_membership(emb.coords, basis.kernel(), us, vs, out)
    return out


def _clique_edges(a: Iterable[int]) -> np.ndarray:
    av = sorted(a)
    if len(av) < 2:
        return np.zeros((0, 2), np.int64)
    return np.array(list(combinations(av, 2)), np.int64)


def closure(g: Graph, d: int, emb: Embedding | None = None, *,
            seed: int = DEFAULT_SEED) -> ClosureReport:
    """The d-rigidity closure: every pair whose row lies in the span of g's rows."""
    return contracted_closure(g, d, (), emb, seed=seed)


def contracted_closure(g: Graph, d: int, a: Iterable[int], emb: Embedding | None = None, *,
                       seed: int = DEFAULT_SEED) -> ClosureReport:
    """Closure in the matroid obtained by contracting every pair inside ``a``.

    A pair f outside C(A, 2) is a member iff its row lies in the span of g's
    rows together with the rows of the clique on ``a``.
    """
    emb = _embedding_for(g, d, emb, seed)
    aset = frozenset(int(v) for v in a)
    if any(not 0 <= v < g.n for v in aset):
        raise ValueError("contracted vertex out of range")
    n = g.n
    clique = _clique_edges(aset)
    full = generic_rank_formula(n, d)
    basis = _span_basis([clique], emb)
    rank_a = basis.rank
    # no rank can exceed that of K_n, so stopping there loses nothing
    basis = _extend(basis, g.edge_array, emb, stop_at=full)
    total = n * (n - 1) // 2
    member = np.zeros(total, bool)
    report = ClosureReport(n, d, aset, member, basis.rank - rank_a, emb.seed)
    if total == 0:
        return report
    dom_ids = np.flatnonzero(report.domain)
    member[dom_ids] = _membership(basis, emb, full, dom_ids)
    return report


def _extend(basis: RowBasis, edges: np.ndarray, emb: Embedding,
            stop_at: int | None = None) -> RowBasis:
    edges = _insertion_order(np.asarray(edges, np.int64).reshape(-1, 2))
    for s in range(0, edges.shape[0], _BATCH):
        if stop_at is not None and basis.rank >= stop_at:
            break
        basis.insert_many(edge_rows(edges[s: s + _BATCH], emb), stop_at)
    return basis


def contracted_rank(g: Graph, d: int, a: Iterable[int], emb: Embedding | None = None, *,
                    seed: int = DEFAULT_SEED) -> int:
    """Dimension of the span of g's rows modulo the span of the clique rows on ``a``."""
    emb = _embedding_for(g, d, emb, seed)
    basis = _span_basis([_clique_edges(a)], emb)
    base = basis.rank
    return _extend(basis, g.edge_array, emb).rank - base


@dataclass
class DimensionSearch:
    d_max: int
    probes: list[tuple[int, bool]] = field(default_factory=list)
    upper_bound: int = 0


def probe_seed(seed: int, d: int) -> int:
    """Embedding seed used when probing dimension ``d``."""
    return derive_seed(seed, "probe", d)


def search_max_rigid_dim(g: Graph, seed: int = DEFAULT_SEED, repeats: int = 1) -> DimensionSearch:
    """Binary search for the largest d with g d-rigid.

    The range is cut to ``min(min_degree, edge_criterion_dmax, n - 1)``, both
    exact necessary conditions; each probe uses a fresh embedding. That upper
    bound is probed first since random graphs usually attain it.
    """
    if g.n <= 1:
        return DimensionSearch(0, [], 0)
    if not g.is_connected():
        return DimensionSearch(0, [], 0)
    hi = min(min_degree(g), edge_criterion_dmax(g.n, g.m), g.n - 1)
    search = DimensionSearch(1, [], hi)
    lo = 1  # connected graphs are 1-rigid
    if hi > lo:
        ok = is_d_rigid(g, hi, seed=probe_seed(seed, hi), repeats=repeats)
        search.probes.append((hi, ok))
        if ok:
            lo = hi
        else:
            hi -= 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        ok = is_d_rigid(g, mid, seed=probe_seed(seed, mid), repeats=repeats)
        search.probes.append((mid, ok))
        if ok:
            lo = mid
        else:
            hi = mid - 1
    search.d_max = lo
    return search


def max_rigid_dim(g: Graph, embedding_seed: int = DEFAULT_SEED, repeats: int = 1) -> int:
    return search_max_rigid_dim(g, embedding_seed, repeats).d_max


@dataclass(frozen=True)
class GlobalRigidityCert:
    certified: bool
    hard_negative: bool

    @property
    def status(self) -> str:
        return "Certified" if self.certified else "Unknown"


def globally_rigid_cert(g: Graph, d: int, seed: int = DEFAULT_SEED,
                        repeats: int = 1) -> GlobalRigidityCert:
    """Certify global d-rigidity through (d+1)-rigidity.

    ``hard_negative`` is set when some vertex has fewer than d+1 neighbours,
    which rules out global d-rigidity.
    """
    hard = g.n > d + 1 and min_degree(g) < d + 1
    ok = not hard and is_d_rigid(g, d + 1, seed=seed, repeats=repeats)
    return GlobalRigidityCert(ok, hard)
