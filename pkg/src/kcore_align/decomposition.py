"""
Cycle-path decomposition of ``l(mu) + l(mu_star)``.

Vertex pairs of each universe are split into regions by how many of their
endpoints are matched identically by ``mu`` and ``mu_star`` (region ``i`` has
``2 - i`` such endpoints).  Both lifted matchings respect the regions, and
within each region their union is a disjoint union of paths and even cycles.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from .errors import InvariantError
from .graph import Matching


def _counts():
    return defaultdict(int)


@dataclass
class DecompositionStats:
    """Component counts per region.

    ``t[i][l]`` counts paths with ``2l + 1`` edges (``l`` of them from
    ``l(mu)``); ``t_cyc[i][l]`` counts cycles with ``2l`` edges.  Lone
    ``l(mu_star)`` edges (paths with no ``l(mu)`` edge) are tallied in
    ``p0_paths``, per region.
    """

    n: int
    d: int
    n_prime: int
    t: dict = field(default_factory=lambda: {0: _counts(), 1: _counts(), 2: _counts()})
    t_cyc: dict = field(default_factory=lambda: {0: _counts(), 1: _counts(), 2: _counts()})
    p0_paths: dict = field(default_factory=lambda: {0: 0, 1: 0, 2: 0})

    @property
    def t_cyc_21(self) -> int:
        return self.t_cyc[2].get(1, 0)

    def weighted_sum(self, region: int) -> int:
        """Number of ``l(mu)`` edges in a region."""
        return sum(l * c for l, c in self.t[region].items()) + sum(
            l * c for l, c in self.t_cyc[region].items()
        )

    def components(self):
        """Iterate ``(region, kind, l, count)`` over nonzero counts."""
        for i in (0, 1, 2):
            for l, c in sorted(self.t[i].items()):
                if c:
                    yield i, "path", l, c
            for l, c in sorted(self.t_cyc[i].items()):
                if c:
                    yield i, "cycle", l, c

    def check(self) -> None:
        """Raise :class:`InvariantError` if a structural identity fails."""
        d, n1 = self.d, self.n_prime
        agree = n1 - d
        problems = []
        if self.t_cyc[1].get(1, 0) != 0:
            problems.append("region 1 contains a 2-cycle")
        if 2 * self.t_cyc_21 > d:
            problems.append(f"t_cyc[2][1] = {self.t_cyc_21} exceeds d/2 = {d / 2}")
        if self.t_cyc[0].get(1, 0) != comb(agree, 2):
            problems.append("region 0 2-cycles do not match C(|mu & mu_star|, 2)")
        if any(c for c in self.t[0].values()) or any(c for l, c in self.t_cyc[0].items() if l >= 2):
            problems.append("region 0 has a component other than a 2-cycle")
        if self.weighted_sum(1) != d * (n1 - d):
            problems.append(f"region 1 weighted sum {self.weighted_sum(1)} != d(n'-d) = {d * (n1 - d)}")
        if self.weighted_sum(2) != comb(d, 2):
            problems.append(f"region 2 weighted sum {self.weighted_sum(2)} != C(d, 2) = {comb(d, 2)}")
        if problems:
            raise InvariantError("; ".join(problems))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "n_prime": self.n_prime,
            "t": {i: dict(sorted(self.t[i].items())) for i in (0, 1, 2)},
            "t_cyc": {i: dict(sorted(self.t_cyc[i].items())) for i in (0, 1, 2)},
            "p0_paths": dict(self.p0_paths),
        }


def _pair(u, v):
    return (u, v) if u < v else (v, u)


def decompose(m: Matching, mu_star: Matching) -> DecompositionStats:
    """Count the paths and cycles of ``l(m) + l(mu_star)`` in each region."""
    n = len(mu_star)
    if not mu_star.is_bijection(n):
        raise ValueError("mu_star must be a bijection on [n]")
    for a, b in m.pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"pair ({a}, {b}) outside [{n}] x [{n}]")
    star = mu_star.as_dict()
    agree = m.intersection(mu_star)
    agree_a = agree.left()
    d = len(m) - len(agree)
    stats = DecompositionStats(n=n, d=d, n_prime=len(m))

    # A-side vertex pair -> B-side vertex pair, for each lifted matching
    star_lift = {}
    for u, v in combinations(range(n), 2):
        star_lift[(u, v)] = _pair(star[u], star[v])
    mu_lift = {}
    for (ua, ub), (va, vb) in combinations(m.pairs, 2):
        mu_lift[_pair(ua, va)] = _pair(ub, vb)
    # multigraph on ("a", pair) / ("b", pair); every node has one l(mu_star)
    # edge and at most one l(mu) edge, so components are paths or cycles
    incident = defaultdict(list)
    for wa, wb in star_lift.items():
        incident[("a", wa)].append((("b", wb), 0))
        incident[("b", wb)].append((("a", wa), 0))
    for wa, wb in mu_lift.items():
        incident[("a", wa)].append((("b", wb), 1))
        incident[("b", wb)].append((("a", wa), 1))

    def region(wa):
        return 2 - (wa[0] in agree_a) - (wa[1] in agree_a)

    seen = set()
    for root in incident:
        if root in seen:
            continue
        seen.add(root)
        stack = [root]
        nodes = []
        half_edges = 0
        half_mu = 0
        while stack:
            x = stack.pop()
            nodes.append(x)
            for y, is_mu in incident[x]:
                half_edges += 1
                half_mu += is_mu
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        edges, mu_edges = half_edges // 2, half_mu // 2
        regions = {region(w) for side, w in nodes if side == "a"}
        if len(regions) != 1:
            raise InvariantError("component crosses regions")
        i = regions.pop()
        if edges == len(nodes):
            if edges != 2 * mu_edges:
                raise InvariantError("cycle with unbalanced edge types")
            stats.t_cyc[i][mu_edges] += 1
        else:
            if edges != 2 * mu_edges + 1:
                raise InvariantError("path does not start and end with l(mu_star) edges")
            if mu_edges == 0:
                stats.p0_paths[i] += 1
            else:
                stats.t[i][mu_edges] += 1
    stats.check()
    return stats


def imposter_matching(n: int, d: int, t_cyc_21: int) -> Matching:
    """A ``mu_star``-maximal matching relative to the identity on ``[n]`` with
    ``d`` wrong pairs, ``t_cyc_21`` of them arranged as transpositions.

    The remaining ``r = d - 2 t_cyc_21`` wrong pairs form one block: a single
    shifted pair when ``r = 1`` (leaving one vertex per side unmatched), or a
    cyclic shift of ``r >= 3`` vertices.  ``r = 2`` would be another
    transposition and is rejected.
    """
    r = d - 2 * t_cyc_21
    if t_cyc_21 < 0 or r < 0 or r == 2 or d > n:
        raise ValueError(f"cannot build d={d} wrong pairs with {t_cyc_21} transpositions")
    pairs = []
    v = 0
    for _ in range(t_cyc_21):
        pairs += [(v, v + 1), (v + 1, v)]
        v += 2
    if r == 1:
        if v + 2 > n:
            raise ValueError("a single shifted pair needs one spare vertex")
        pairs.append((v, v + 1))
        v += 2
    elif r >= 3:
        pairs += [(v + i, v + (i + 1) % r) for i in range(r)]
        v += r
    pairs += [(u, u) for u in range(v, n)]
    return Matching(pairs)
