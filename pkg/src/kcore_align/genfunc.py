"""
Generating functions for the M statistic.

``a_l`` / ``a°_l`` are the path / cycle factors built from the joint-law matrix
``P`` and ``Z = [[1, 1], [1, z]]``; ``b_l`` / ``b°_l`` are the binary-string
enumerators they reduce to.  All functions accept floats, ``Fraction`` or
``mpmath`` numbers and keep the arithmetic in that type.
"""
from __future__ import annotations

import math

from .decomposition import DecompositionStats
from .model import CorrelationParams


def _mul(X, Y):
    return (
        (X[0][0] * Y[0][0] + X[0][1] * Y[1][0], X[0][0] * Y[0][1] + X[0][1] * Y[1][1]),
        (X[1][0] * Y[0][0] + X[1][1] * Y[1][0], X[1][0] * Y[0][1] + X[1][1] * Y[1][1]),
    )


def _pow(X, e):
    one = X[0][0] * 0 + 1
    zero = one * 0
    R = ((one, zero), (zero, one))
    while e:
        if e & 1:
            R = _mul(R, X)
        X = _mul(X, X)
        e >>= 1
    return R


def _check_length(l):
    if l < 1:
        raise ValueError(f"length must be >= 1, got {l}")


def _transfer(x, y):
    # T[s][t]: weight of appending bit t after bit s
    one = x * 0 + 1
    return ((one, x), (one, x * y))


def b_poly(l: int, x, y):
    """Sum over ``f`` in ``{0,1}^l`` of ``x^(#ones) y^(#adjacent 11 pairs)``."""
    _check_length(l)
    T = _pow(_transfer(x, y), l - 1)
    one = x * 0 + 1
    return one * (T[0][0] + T[0][1]) + x * (T[1][0] + T[1][1])


def b_poly_cyclic(l: int, x, y):
    """As :func:`b_poly`, also counting the wrap-around pair (trace of ``T^l``)."""
    _check_length(l)
    T = _pow(_transfer(x, y), l)
    return T[0][0] + T[1][1]


def _PZ(z, p: CorrelationParams):
    one = z * 0 + 1
    P = ((p.p00 * one, p.p01 * one), (p.p10 * one, p.p11 * one))
    Z = ((one, one), (one, z))
    return P, _mul(P, Z)


def a_poly(l: int, z, p: CorrelationParams):
    """Path factor ``1^T (PZ)^l P 1``."""
    _check_length(l)
    P, PZ = _PZ(z, p)
    R = _mul(_pow(PZ, l), P)
    return R[0][0] + R[0][1] + R[1][0] + R[1][1]


def a_poly_cyclic(l: int, z, p: CorrelationParams):
    """Cycle factor ``tr((PZ)^l)``."""
    _check_length(l)
    _, PZ = _PZ(z, p)
    R = _pow(PZ, l)
    return R[0][0] + R[1][1]


def gf_exact(stats: DecompositionStats, p: CorrelationParams, z):
    """``E[z^M]`` as a product over the components of the decomposition.

    Region-1 components contribute factors in ``z`` and region-2 components
    factors in ``z^2`` (each of their edges touches two wrong pairs).  Region 0
    and lone ``l(mu_star)`` edges contribute 1.
    """
    result = z * 0 + 1
    for region, kind, l, count in stats.components():
        if region == 0:
            continue
        w = z if region == 1 else z * z
        f = a_poly(l, w, p) if kind == "path" else a_poly_cyclic(l, w, p)
        result = result * f**count
    return result


def log_gf_upper_bound(stats: DecompositionStats, p: CorrelationParams, z, n: int | None = None) -> float:
    """Logarithm of the closed-form upper bound on ``E[z^M]`` for ``z >= 1``.

    ``n`` is the size of the ambient universe (defaults to ``stats.n``); it
    only enters through ``t~ = d (n - 1) - 2 t_cyc[2][1]``, and any
    ``n >= |mu|`` gives a valid bound.
    """
    if p.p11 * p.p00 < p.p10 * p.p01:
        raise ValueError("bound requires p11 p00 >= p10 p01")
    if n is None:
        n = stats.n
    t21 = stats.t_cyc_21
    t_tilde = stats.d * (n - 1) - 2 * t21
    w = z * z - 1
    return t21 * p.p11 * w + t_tilde / 4 * (2 * p.p1_star * p.p_star1 * w + p.p11**2 * w * w)


def gf_upper_bound(stats: DecompositionStats, p: CorrelationParams, z, n: int | None = None) -> float:
    log_b = log_gf_upper_bound(stats, p, z, n)
    return math.exp(log_b) if log_b < 709 else math.inf
