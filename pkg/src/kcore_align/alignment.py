"""
k-core alignments, weak k-core alignments and the edge-overlap (MAP) estimator.

A matching ``mu`` is a k-core alignment of ``(Ga, Gb)`` when the aligned
intersection ``Ga ^_mu Gb`` has minimum degree at least ``k`` and no strictly
larger matching has that property.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .graph import (
    Graph,
    Matching,
    _check_matching_fits,
    aligned_intersection,
    k_core,
    min_degree,
)
from .model import CorrelationParams, as_generator


@dataclass(frozen=True)
class AlignmentVerdict:
    """Outcome of :func:`is_k_core_alignment`.

    ``violating_vertex`` is a pair of minimum intersection degree when that
    degree is below ``k``.  ``extension_witness`` is a set of pairs that can be
    added while keeping the minimum degree at least ``k``.
    """

    is_k_core_alignment: bool
    violating_vertex: tuple | None = None
    extension_witness: Matching | None = None

    def __post_init__(self):
        if self.is_k_core_alignment and (
            self.violating_vertex is not None or self.extension_witness is not None
        ):
            raise ValueError("a positive verdict carries no violation or witness")

    def __bool__(self):
        return self.is_k_core_alignment


@dataclass(frozen=True)
class MStatistic:
    """Total intersection degree over the pairs of ``mu`` not in ``mu_star``."""

    value: int
    d: int
    k_threshold: int

    @property
    def is_weak(self) -> bool:
        return self.value >= self.k_threshold * self.d


@dataclass(frozen=True)
class MapEstimate:
    matching: Matching
    overlap: int
    ties: int


# ---------------------------------------------------------------------------
# Search over sub-matchings of the product graph
# ---------------------------------------------------------------------------

def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class _ProductSearch:
    """Bitmask view of ``Ga x Gb`` restricted to a set of candidate pairs.

    A set of pairs that forms a matching with minimum intersection degree
    ``>= k`` lies inside the k-core of the product graph induced on any
    candidate set containing it, so peeling the candidates prunes the search
    soundly.
    """

    def __init__(self, Ga: Graph, Gb: Graph, nodes):
        self.nodes = list(nodes)
        self.index = {v: i for i, v in enumerate(self.nodes)}
        adj = [0] * len(self.nodes)
        index = self.index
        for i, (a, b) in enumerate(self.nodes):
            nb = Gb.adj[b]
            acc = 0
            for a2 in Ga.adj[a]:
                for b2 in nb:
                    j = index.get((a2, b2))
                    if j is not None:
                        acc |= 1 << j
            adj[i] = acc
        self.adj = adj
        self.row = {}
        self.col = {}
        for i, (a, b) in enumerate(self.nodes):
            self.row[a] = self.row.get(a, 0) | (1 << i)
            self.col[b] = self.col.get(b, 0) | (1 << i)

    def mask(self, pairs) -> int:
        m = 0
        for p in pairs:
            m |= 1 << self.index[p]
        return m

    def to_matching(self, mask: int) -> Matching:
        return Matching(self.nodes[i] for i in _bits(mask))

    def peel(self, alive: int, fixed: int, k: int):
        """k-core of the product graph on ``alive``; ``None`` if a node of
        ``fixed`` would be removed."""
        adj = self.adj
        stack = [v for v in _bits(alive) if (adj[v] & alive).bit_count() < k]
        while stack:
            v = stack.pop()
            bit = 1 << v
            if not alive & bit:
                continue
            if fixed & bit:
                return None
            alive &= ~bit
            for u in _bits(adj[v] & alive):
                if (adj[u] & alive).bit_count() < k:
                    stack.append(u)
        return alive

    def search(self, lefts, alive, base, k, *, first_only=False, nonempty=False):
        """All masks ``X`` of candidate pairs (rows from ``lefts``) forming a
        matching such that every pair of ``X`` has degree ``>= k`` in ``X | base``."""
        out = []
        lefts = list(lefts)

        def rec(pos, chosen, alive):
            if pos == len(lefts):
                if nonempty and not chosen:
                    return False
                out.append(chosen)
                return first_only
            a = lefts[pos]
            row = alive & self.row.get(a, 0) & ~chosen
            fixed = chosen | base
            for v in _bits(row):
                bit = 1 << v
                b = self.nodes[v][1]
                nxt = (alive & ~(self.row[a] | self.col[b])) | bit
                nxt = self.peel(nxt, fixed | bit, k)
                if nxt is not None and rec(pos + 1, chosen | bit, nxt):
                    return True
            nxt = self.peel(alive & ~row, fixed, k)
            if nxt is not None and rec(pos + 1, chosen, nxt):
                return True
            return False

        rec(0, 0, alive)
        return out


def _find_extension(Ga: Graph, Gb: Graph, m: Matching, k: int) -> Matching | None:
    """A nonempty set of pairs ``X`` with ``m | X`` a matching and
    ``min_degree(Ga ^_{m|X} Gb) >= k``, assuming ``m`` already satisfies it."""
    left_free = [a for a in range(Ga.n) if a not in m.left()]
    right_free = [b for b in range(Gb.n) if b not in m.right()]
    if not left_free or not right_free:
        return None
    cand = [(a, b) for a in left_free for b in right_free]
    S = _ProductSearch(Ga, Gb, list(m.pairs) + cand)
    base = S.mask(m.pairs)
    alive = S.peel((1 << len(S.nodes)) - 1, base, k)
    if alive is None or alive == base:
        return None
    found = S.search(left_free, alive, base, k, first_only=True, nonempty=True)
    return S.to_matching(found[0]) if found else None


def is_k_core_alignment(Ga: Graph, Gb: Graph, m: Matching, k: int) -> AlignmentVerdict:
    """Check both conditions of a k-core alignment exactly.

    Maximality has to consider adding several pairs at once: a single new pair
    may have too few neighbours on its own while a group of new pairs supports
    each other.  Adding pairs never lowers the degree of a pair already present
    (the old intersection is an induced subgraph of the new one), so only the
    new pairs need checking; the search over groups is pruned by peeling the
    product graph on the free pairs.
    """
    _check_matching_fits(Ga, Gb, m)
    G = aligned_intersection(Ga, Gb, m)
    if min_degree(G) < k:
        degs = G.degrees()
        worst = min(range(G.n), key=lambda i: (degs[i], m.pairs[i]))
        return AlignmentVerdict(False, violating_vertex=m.pairs[worst])
    ext = _find_extension(Ga, Gb, m, k)
    if ext is not None:
        return AlignmentVerdict(False, extension_witness=ext)
    return AlignmentVerdict(True)


def enumerate_k_core_alignments(Ga: Graph, Gb: Graph, k: int, n_limit: int = 8) -> list[Matching]:
    """Every k-core alignment, in lexicographic order of the sorted pair lists."""
    if Ga.n > n_limit or Gb.n > n_limit:
        raise ValueError(f"exhaustive enumeration limited to {n_limit} vertices per graph")
    nodes = [(a, b) for a in range(Ga.n) for b in range(Gb.n)]
    S = _ProductSearch(Ga, Gb, nodes)
    alive = S.peel((1 << len(nodes)) - 1, 0, k)
    family = S.search(range(Ga.n), alive, 0, k)
    family.sort(key=lambda x: -x.bit_count())
    maximal: list[int] = []
    for x in family:
        if not any(x & y == x for y in maximal):
            maximal.append(x)
    return sorted((S.to_matching(x) for x in maximal), key=lambda mm: mm.pairs)


def kcore_align_greedy(
    Ga: Graph, Gb: Graph, k: int, seed_matching: Matching, extend: bool = True
) -> Matching:
    """Heuristic for instances too large for exhaustive search.

    Peels pairs of ``seed_matching`` whose intersection degree is below ``k``,
    then repeatedly adds any free pair ``(a, b)`` that already has ``k``
    neighbours among the current pairs.  The result has minimum intersection
    degree at least ``k``; it need not be a k-core alignment.
    """
    _check_matching_fits(Ga, Gb, seed_matching)
    if k == 0:
        return seed_matching
    G = aligned_intersection(Ga, Gb, seed_matching)
    core = k_core(G, k)
    current = {a: b for i, (a, b) in enumerate(seed_matching.pairs) if i in core}
    if not extend:
        return Matching(current.items())
    while True:
        added = False
        used_b = set(current.values())
        for a in range(Ga.n):
            if a in current:
                continue
            nbrs = [(a2, current[a2]) for a2 in Ga.adj[a] if a2 in current]
            if len(nbrs) < k:
                continue
            for b in range(Gb.n):
                if b in used_b:
                    continue
                adj_b = Gb.adj[b]
                if sum(1 for _, b2 in nbrs if b2 in adj_b) >= k:
                    current[a] = b
                    used_b.add(b)
                    added = True
                    break
        if not added:
            return Matching(current.items())


def oracle_kcore_estimate(Ga: Graph, Gb: Graph, mu_star: Matching, k: int) -> Matching:
    """The planted matching restricted to the k-core of its own intersection."""
    G = aligned_intersection(Ga, Gb, mu_star)
    core = k_core(G, k)
    return Matching(mu_star.pairs[i] for i in sorted(core))


# ---------------------------------------------------------------------------
# M statistic
# ---------------------------------------------------------------------------

def m_statistic(Ga: Graph, Gb: Graph, m: Matching, mu_star: Matching, k: int) -> MStatistic:
    """Sum of intersection degrees over the pairs of ``m`` that are not in ``mu_star``."""
    _check_matching_fits(Ga, Gb, m)
    G = aligned_intersection(Ga, Gb, m)
    star = mu_star.as_set()
    wrong = [i for i, pr in enumerate(m.pairs) if pr not in star]
    return MStatistic(sum(G.degree(i) for i in wrong), len(wrong), k)


def m_statistic_by_edges(Ga: Graph, Gb: Graph, m: Matching, mu_star: Matching) -> int:
    """Same quantity as :func:`m_statistic`, summed over intersection edges,
    each weighted by how many of its endpoints are wrong pairs."""
    G = aligned_intersection(Ga, Gb, m)
    star = mu_star.as_set()
    wrong = [pr not in star for pr in m.pairs]
    return sum(int(wrong[i]) + int(wrong[j]) for i, j in G.edges)


def mu_star_maximal_extension(m: Matching, mu_star: Matching) -> Matching:
    """Add every pair of ``mu_star`` whose endpoints are both uncovered by ``m``."""
    la, rb = m.left(), m.right()
    return m.union((a, b) for a, b in mu_star.pairs if a not in la and b not in rb)


def is_mu_star_maximal(m: Matching, mu_star: Matching) -> bool:
    la, rb = m.left(), m.right()
    return all(a in la or b in rb for a, b in mu_star.pairs)


def sample_m_statistic(
    m: Matching, mu_star: Matching, p: CorrelationParams, n_samples: int, rng, chunk: int = 4096
) -> np.ndarray:
    """Monte Carlo draws of ``M(m, mu_star; Ga, Gb)`` with ``(Ga, Gb) ~ ER(mu_star, p)``.

    Only the aligned edge pairs that can touch a wrong pair of ``m`` are drawn.
    """
    gen = as_generator(rng)
    inv = mu_star.inverse_dict()
    star_set = mu_star.as_set()
    wrong = [pr for pr in m.pairs if pr not in star_set]
    coord = {}

    def cid(wa):
        key = (min(wa), max(wa))
        if key not in coord:
            coord[key] = len(coord)
        return coord[key]

    ia, ib = [], []
    for v in wrong:
        for u in m.pairs:
            if u == v:
                continue
            ia.append(cid((v[0], u[0])))
            # the Gb pair {v_b, u_b} is aligned with the Ga pair {inv[v_b], inv[u_b]}
            ib.append(cid((inv[v[1]], inv[u[1]])))
    if not ia:
        return np.zeros(n_samples, dtype=np.int64)
    ia = np.array(ia)
    ib = np.array(ib)
    cum = np.cumsum([p.p00, p.p01, p.p10])
    out = np.empty(n_samples, dtype=np.int64)
    ncoord = len(coord)
    for start in range(0, n_samples, chunk):
        size = min(chunk, n_samples - start)
        cells = np.searchsorted(cum, gen.random((size, ncoord)), side="right")
        ga = cells >= 2
        gb = (cells & 1).astype(bool)
        out[start:start + size] = (ga[:, ia] & gb[:, ib]).sum(axis=1)
    return out


# ---------------------------------------------------------------------------
# Maximum edge overlap
# ---------------------------------------------------------------------------

def map_estimate_bruteforce(Ga: Graph, Gb: Graph, p: CorrelationParams, n_limit: int = 8) -> MapEstimate:
    """Bijection maximising ``|E(Ga ^_mu Gb)|``; the lexicographically first
    maximiser is returned together with the number of tied maximisers."""
    if Ga.n != Gb.n:
        raise ValueError("MAP estimation needs graphs of equal order")
    n = Ga.n
    if n > n_limit:
        raise ValueError(f"brute-force MAP limited to n <= {n_limit}")
    if not p.positively_correlated:
        raise ValueError("edge-overlap maximisation equals MAP only under positive correlation")
    A = Ga.adjacency_matrix().astype(np.int32)
    B = Gb.adjacency_matrix().astype(np.int32)
    perms = np.array(list(permutations(range(n))), dtype=np.int64).reshape(-1, n)
    overlap = np.einsum("ij,pij->p", A, B[perms[:, :, None], perms[:, None, :]]) // 2
    best = int(overlap.max())
    winners = np.flatnonzero(overlap == best)
    return MapEstimate(Matching.from_permutation(perms[winners[0]].tolist()), best, int(winners.size))


def edge_overlap(Ga: Graph, Gb: Graph, m: Matching) -> int:
    return aligned_intersection(Ga, Gb, m).num_edges
