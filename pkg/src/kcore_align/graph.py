"""
Finite labeled graphs, matchings between two vertex universes, lifted
matchings, aligned intersections, tensor products and k-core peeling.

Vertex ids are dense integers ``0..n-1`` in each universe.  The two universes
of a matching are independent, so vertex ``0`` on the left and vertex ``0`` on
the right are unrelated.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

#: Minimum degree of the null graph.
INFINITY = math.inf


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``.

    Edges are kept both as a set of sorted pairs (membership tests) and as
    per-vertex neighbour sets (degrees and peeling).
    """

    __slots__ = ("n", "edges", "adj", "labels")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = (), labels=None):
        n = int(n)
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        adj = [set() for _ in range(n)]
        es = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
            key = _edge(u, v)
            if key in es:
                raise ValueError(f"duplicate edge {key}")
            es.add(key)
            adj[u].add(v)
            adj[v].add(u)
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise ValueError("labels must have one entry per vertex")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(es))
        object.__setattr__(self, "adj", tuple(frozenset(a) for a in adj))
        object.__setattr__(self, "labels", labels)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges)})"

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, combinations(range(n), 2))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n)

    @classmethod
    def from_adjacency(cls, A) -> "Graph":
        A = np.asarray(A)
        iu, ju = np.nonzero(np.triu(A, 1))
        return cls(A.shape[0], zip(iu.tolist(), ju.tolist()))

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and _edge(u, v) in self.edges

    def neighbors(self, v: int) -> frozenset:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adj]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=bool)
        if self.edges:
            e = np.array(sorted(self.edges))
            A[e[:, 0], e[:, 1]] = True
            A[e[:, 1], e[:, 0]] = True
        return A

    def induced_subgraph(self, vertices: Sequence[int]) -> "Graph":
        """Subgraph induced by ``vertices``, relabelled ``0..len(vertices)-1`` in the given order."""
        index = {v: i for i, v in enumerate(vertices)}
        if len(index) != len(vertices):
            raise ValueError("repeated vertex in induced_subgraph")
        es = []
        for v, i in index.items():
            for u in self.adj[v]:
                j = index.get(u)
                if j is not None and i < j:
                    es.append((i, j))
        return Graph(len(vertices), es)


@dataclass(frozen=True)
class Matching:
    """Partial injective pairing ``{(a, b)}`` between a left and a right universe.

    Pairs are stored sorted, so two matchings with the same pairs compare equal
    and the tuple order is the lexicographic order used for tie-breaking.
    """

    pairs: tuple

    def __init__(self, pairs: Iterable[Sequence[int]] = ()):
        ps = tuple(sorted((int(a), int(b)) for a, b in pairs))
        left = [a for a, _ in ps]
        right = [b for _, b in ps]
        if len(set(left)) != len(left):
            raise ValueError("left vertex appears in more than one pair")
        if len(set(right)) != len(right):
            raise ValueError("right vertex appears in more than one pair")
        object.__setattr__(self, "pairs", ps)

    @classmethod
    def identity(cls, n: int) -> "Matching":
        return cls((i, i) for i in range(n))

    @classmethod
    def from_permutation(cls, perm: Sequence[int]) -> "Matching":
        """Bijection ``{(i, perm[i])}``."""
        return cls(enumerate(perm))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __contains__(self, pair):
        return tuple(pair) in self.as_set()

    def as_set(self) -> frozenset:
        return frozenset(self.pairs)

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def inverse_dict(self) -> dict[int, int]:
        return {b: a for a, b in self.pairs}

    def left(self) -> set[int]:
        return {a for a, _ in self.pairs}

    def right(self) -> set[int]:
        return {b for _, b in self.pairs}

    def union(self, other: "Matching | Iterable") -> "Matching":
        return Matching(set(self.pairs) | set(other))

    def intersection(self, other) -> "Matching":
        return Matching(set(self.pairs) & set(other))

    def difference(self, other) -> "Matching":
        return Matching(set(self.pairs) - set(other))

    def issubset(self, other) -> bool:
        return set(self.pairs) <= set(other)

    def is_bijection(self, n_left: int, n_right: int | None = None) -> bool:
        if n_right is None:
            n_right = n_left
        return (
            len(self.pairs) == n_left == n_right
            and self.left() == set(range(n_left))
            and self.right() == set(range(n_right))
        )

    def permutation(self) -> list[int]:
        """For a bijection on ``[n]``, the list ``perm`` with ``perm[a] = b``."""
        perm = [b for _, b in self.pairs]
        if [a for a, _ in self.pairs] != list(range(len(perm))):
            raise ValueError("matching is not a bijection on [n]")
        return perm


def support_left(m: Matching) -> set[int]:
    return m.left()


def support_right(m: Matching) -> set[int]:
    return m.right()


@dataclass(frozen=True)
class LiftedMatching:
    """Matching between unordered vertex pairs; each entry is ``((a1, a2), (b1, b2))``
    with both inner pairs sorted."""

    pairs: tuple

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def as_dict(self) -> dict:
        return dict(self.pairs)


def lift(m: Matching) -> LiftedMatching:
    """All ``({u_a, v_a}, {u_b, v_b})`` for unordered pairs of pairs of ``m``."""
    out = []
    for (ua, ub), (va, vb) in combinations(m.pairs, 2):
        out.append((_edge(ua, va), _edge(ub, vb)))
    return LiftedMatching(tuple(out))


def _check_matching_fits(Ga: Graph, Gb: Graph, m: Matching) -> None:
    for a, b in m.pairs:
        if not (0 <= a < Ga.n and 0 <= b < Gb.n):
            raise ValueError(f"pair ({a}, {b}) is outside V(Ga) x V(Gb)")


def aligned_intersection(Ga: Graph, Gb: Graph, m: Matching) -> Graph:
    """Graph on the pairs of ``m`` (vertex ``i`` is ``m.pairs[i]``) with an edge
    between two pairs when both graphs have the corresponding edge."""
    _check_matching_fits(Ga, Gb, m)
    index_a = {a: i for i, (a, _) in enumerate(m.pairs)}
    right = [b for _, b in m.pairs]
    es = []
    for i, (a, b) in enumerate(m.pairs):
        nb = Gb.adj[b]
        for a2 in Ga.adj[a]:
            j = index_a.get(a2)
            if j is not None and i < j and right[j] in nb:
                es.append((i, j))
    return Graph(len(m.pairs), es, labels=m.pairs)


def intersection_degrees(Ga: Graph, Gb: Graph, m: Matching) -> dict[tuple[int, int], int]:
    """Degree of each pair of ``m`` in the aligned intersection."""
    G = aligned_intersection(Ga, Gb, m)
    return {pair: G.degree(i) for i, pair in enumerate(m.pairs)}


def product_vertex(ua: int, ub: int, n_b: int) -> int:
    """Id of ``(ua, ub)`` in ``tensor_product(Ga, Gb)``."""
    return ua * n_b + ub


def tensor_product(Ga: Graph, Gb: Graph) -> Graph:
    """Tensor product: ``(ua, ub) ~ (va, vb)`` iff ``ua ~ va`` in Ga and ``ub ~ vb`` in Gb."""
    nb = Gb.n
    es = []
    for x, y in Ga.edges:
        for s, t in Gb.edges:
            es.append((x * nb + s, y * nb + t))
            es.append((x * nb + t, y * nb + s))
    return Graph(Ga.n * nb, es)


def min_degree(G: Graph) -> float:
    """Minimum degree; ``INFINITY`` for the null graph."""
    if G.n == 0:
        return INFINITY
    return min(len(a) for a in G.adj)


def k_core(G: Graph, k: int) -> set[int]:
    """Vertex set of the k-core (possibly empty), by repeated removal of
    vertices whose remaining degree is below ``k``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    deg = [len(a) for a in G.adj]
    removed = [False] * G.n
    queue = deque(v for v in range(G.n) if deg[v] < k)
    for v in queue:
        removed[v] = True
    while queue:
        v = queue.popleft()
        for u in G.adj[v]:
            if not removed[u]:
                deg[u] -= 1
                if deg[u] < k:
                    removed[u] = True
                    queue.append(u)
    return {v for v in range(G.n) if not removed[v]}


def core_numbers(G: Graph) -> list[int]:
    """Core number of every vertex (bucket-queue peeling, O(V + E))."""
    n = G.n
    deg = [len(a) for a in G.adj]
    maxdeg = max(deg, default=0)
    bins = [0] * (maxdeg + 1)
    for d in deg:
        bins[d] += 1
    start = 0
    for d in range(maxdeg + 1):
        bins[d], start = start, start + bins[d]
    order = [0] * n
    pos = [0] * n
    for v in range(n):
        pos[v] = bins[deg[v]]
        order[pos[v]] = v
        bins[deg[v]] += 1
    for d in range(maxdeg, 0, -1):
        bins[d] = bins[d - 1]
    bins[0] = 0
    for i in range(n):
        v = order[i]
        for u in G.adj[v]:
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bins[du]
                w = order[pw]
                if u != w:
                    order[pu], order[pw] = w, u
                    pos[u], pos[w] = pw, pu
                bins[du] += 1
                deg[u] -= 1
    return deg


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def graph_to_edgelist(G: Graph) -> str:
    lines = [str(G.n)] + [f"{u} {v}" for u, v in G.sorted_edges()]
    return "\n".join(lines) + "\n"


def graph_from_edgelist(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 1:
        raise ValueError("edge-list text must start with the vertex count on its own line")
    n = int(rows[0][0])
    edges = []
    for lineno, r in enumerate(rows[1:], start=2):
        if len(r) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {' '.join(r)!r}")
        edges.append((int(r[0]), int(r[1])))
    return Graph(n, edges)


def graph_to_dict(G: Graph) -> dict:
    d = {"n": G.n, "edges": [list(e) for e in G.sorted_edges()]}
    if G.labels is not None:
        d["labels"] = [list(x) if isinstance(x, tuple) else x for x in G.labels]
    return d


def graph_from_dict(d: dict) -> Graph:
    extra = set(d) - {"n", "edges", "labels"}
    if extra:
        raise ValueError(f"unknown graph fields: {sorted(extra)}")
    return Graph(d["n"], d.get("edges", []), labels=d.get("labels"))


def matching_to_dict(m: Matching) -> dict:
    return {"pairs": [list(p) for p in m.pairs]}


def matching_from_dict(d: dict) -> Matching:
    extra = set(d) - {"pairs"}
    if extra:
        raise ValueError(f"unknown matching fields: {sorted(extra)}")
    return Matching(d["pairs"])


def load_graph(path) -> Graph:
    """Read a graph from JSON (``{"n", "edges"}``) or edge-list text."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return graph_from_dict(json.loads(text))
    return graph_from_edgelist(text)


def save_graph(G: Graph, path) -> None:
    with open(path, "w") as fh:
        if str(path).endswith(".json"):
            json.dump(graph_to_dict(G), fh)
            fh.write("\n")
        else:
            fh.write(graph_to_edgelist(G))


def load_matching(path) -> Matching:
    with open(path) as fh:
        return matching_from_dict(json.load(fh))


def save_matching(m: Matching, path) -> None:
    with open(path, "w") as fh:
        json.dump(matching_to_dict(m), fh)
        fh.write("\n")
