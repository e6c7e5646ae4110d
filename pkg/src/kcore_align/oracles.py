"""
Slow reference implementations used to cross-check the fast routines.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from .graph import Graph, Matching
from .model import CorrelationParams

KCORE_ORACLE_LIMIT = 12
GF_ORACLE_LIMIT = 11


def kcore_bruteforce(G: Graph, k: int) -> set[int]:
    """Largest vertex set whose induced subgraph has minimum degree >= k,
    by scanning subsets from largest to smallest."""
    n = G.n
    if n > KCORE_ORACLE_LIMIT:
        raise ValueError(f"subset oracle limited to n <= {KCORE_ORACLE_LIMIT}")
    nbr = [0] * n
    for u, v in G.edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    for size in range(n, 0, -1):
        for S in combinations(range(n), size):
            mask = sum(1 << v for v in S)
            if all((nbr[v] & mask).bit_count() >= k for v in S):
                return set(S)
    return set()


def b_poly_enumerate(l: int, x, y):
    """``b_l`` / ``b°_l`` inputs summed over all binary strings (path form)."""
    return _b_enum(l, x, y, cyclic=False)


def b_poly_cyclic_enumerate(l: int, x, y):
    return _b_enum(l, x, y, cyclic=True)


def _b_enum(l, x, y, cyclic):
    if l < 1:
        raise ValueError("length must be >= 1")
    total = x * 0
    for f in product((0, 1), repeat=l):
        ones = sum(f)
        adj = sum(f[i] & f[i + 1] for i in range(l - 1))
        if cyclic:
            adj += f[-1] & f[0]
        total += x**ones * y**adj
    return total


def _pair(u, v):
    return (u, v) if u < v else (v, u)


def gf_bruteforce(m: Matching, mu_star: Matching, p: CorrelationParams, z):
    """``E[z^M]`` by summing over every outcome of the aligned edge pairs that
    can touch a wrong pair of ``m``.

    Outcomes are grouped by ``M`` and by how often each cell of ``p`` occurs;
    the group sizes are exact integers, so the result is exact for ``Fraction``
    inputs and compensated-summed otherwise.
    """
    inv = mu_star.inverse_dict()
    star_set = mu_star.as_set()
    wrong = [v for v in m.pairs if v not in star_set]
    # each term of M is Ga(w_a) * Gb(w_b) for an intersection edge at a wrong pair
    terms = []
    coords = {}
    for v in wrong:
        for u in m.pairs:
            if u != v:
                a = _pair(v[0], u[0])
                b = _pair(inv[v[1]], inv[u[1]])
                terms.append((coords.setdefault(a, len(coords)), coords.setdefault(b, len(coords))))
    c = len(coords)
    if c > GF_ORACLE_LIMIT:
        raise ValueError(f"outcome oracle limited to {GF_ORACLE_LIMIT} coordinates")
    one = z * 0 + 1
    if c == 0:
        return one
    # outcome digit per coordinate: 0 -> 00, 1 -> 01, 2 -> 10, 3 -> 11
    cells = (np.arange(4**c, dtype=np.int64)[:, None] >> (2 * np.arange(c))) & 3
    ga, gb = cells >> 1, cells & 1
    ia = np.array([t[0] for t in terms])
    ib = np.array([t[1] for t in terms])
    M = (ga[:, ia] & gb[:, ib]).sum(axis=1)
    n01, n10, n11 = ((cells == j).sum(axis=1) for j in (1, 2, 3))
    base = c + 1
    keys = ((M * base + n01) * base + n10) * base + n11
    uniq, mult = np.unique(keys, return_counts=True)
    parts = []
    for key, cnt in zip(uniq.tolist(), mult.tolist()):
        key, k11 = divmod(key, base)
        key, k10 = divmod(key, base)
        Mv, k01 = divmod(key, base)
        k00 = c - k01 - k10 - k11
        parts.append(cnt * p.p00**k00 * p.p01**k01 * p.p10**k10 * p.p11**k11 * z**Mv)
    if isinstance(parts[0], Fraction):
        return sum(parts, Fraction(0))
    return math.fsum(float(x) for x in parts)
