"""Shared instances for the test suite.

Hand-built instances store the right universe with its labels shifted down
by 5, so right vertex 5 is stored as 0.
"""
from __future__ import annotations

import numpy as np

from kcore_align import CorrelationParams, Graph, Matching

SHIFT = 5


def shifted(pairs):
    return [(a, b - SHIFT) for a, b in pairs]


def five_vertex_pair():
    Ga = Graph(5, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 4)])
    Gb = Graph(5, [(u - SHIFT, v - SHIFT) for u, v in [(5, 6), (6, 9), (7, 9), (5, 7), (6, 7), (7, 8)]])
    mu = Matching(shifted([(0, 7), (1, 5), (2, 6), (3, 9)]))
    return Ga, Gb, mu


def swap_matchings():
    mu_star = Matching(shifted([(0, 5), (1, 6), (2, 7), (3, 8), (4, 9)]))
    mu = Matching(shifted([(0, 6), (2, 8), (3, 7), (4, 9)]))
    return mu, mu_star


def random_graph(n, p, gen):
    A = np.triu(gen.random((n, n)) < p, 1)
    return Graph.from_adjacency(A | A.T)


def random_partial_matching(n, gen, size=None):
    if size is None:
        size = int(gen.integers(0, n + 1))
    a = gen.permutation(n)[:size]
    b = gen.permutation(n)[:size]
    return Matching(zip(a.tolist(), b.tolist()))


def random_positive_params(gen, floor=0.0):
    """Random p with p11 p00 >= p10 p01 (rejection sampling)."""
    while True:
        v = gen.dirichlet(np.ones(4)) + floor
        v = v / v.sum()
        p00, p01, p10, p11 = v.tolist()
        p00 = 1.0 - p01 - p10 - p11
        if p11 * p00 >= p10 * p01:
            return CorrelationParams(p00, p01, p10, p11)


def random_params(gen):
    v = gen.dirichlet(np.ones(4)).tolist()
    return CorrelationParams(1.0 - v[1] - v[2] - v[3], v[1], v[2], v[3])
