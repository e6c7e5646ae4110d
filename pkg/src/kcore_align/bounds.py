"""
Chernoff-type tail bounds on the M statistic and the union bound over
imposter matchings.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .model import CorrelationParams


@dataclass(frozen=True)
class BoundReport:
    q1: float
    q2: float
    tau: float
    t_tilde: float
    z_star: float
    zeta: float
    log_tail_bound: float
    xi: float
    union_bound: float | None = None
    d: int | None = None
    t_cyc_21: int | None = None
    log_chernoff: float | None = None

    @property
    def tail_bound(self) -> float:
        return math.exp(self.log_tail_bound)

    def to_dict(self) -> dict:
        return asdict(self)


def chernoff_objective_log(z, q1, q2, tau):
    """``log(exp(q2 (z^2 - 1) + q1 (z - 1)) z^-tau)``."""
    z = np.asarray(z, dtype=float)
    return q2 * (z * z - 1) + q1 * (z - 1) - tau * np.log(z)


def chernoff_optimize(q1: float, q2: float, tau: float) -> tuple[float, float]:
    """Minimiser ``z*`` of ``exp(q2 (z^2 - 1) + q1 (z - 1)) z^-tau`` over
    ``z > 0`` and the constant ``zeta`` with ``min <= zeta^tau``."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    if q1 < 0 or q2 < 0:
        raise ValueError("q1 and q2 must be non-negative")
    if q1 == 0 and q2 == 0:
        raise ValueError("q1 and q2 cannot both vanish")
    # positive root of 2 q2 z^2 + q1 z - tau = 0, in the cancellation-free form
    z_star = 2 * tau / (q1 + math.sqrt(q1 * q1 + 8 * tau * q2))
    zeta = max(math.sqrt(2) * math.e * q1 / tau, 4 * math.e * math.sqrt(q2 / tau))
    return z_star, zeta


def _q_terms(n, d, k, p: CorrelationParams, t_cyc_21):
    t_tilde = d * (n - 1) - 2 * t_cyc_21
    q2 = t_tilde / 4 * p.p11**2
    q1 = t_cyc_21 * p.p11 + t_tilde / 2 * (p.p1_star * p.p_star1 - p.p11**2)
    tau = d * k / 2
    return q1, q2, tau, t_tilde


def tail_bound(n: int, d: int, k: int, p: CorrelationParams, t_cyc_21: int) -> BoundReport:
    """Bound on ``Pr[M >= k d]`` for an imposter matching with ``d`` wrong pairs
    and ``t_cyc_21`` transposition-like 4-cycles relative to the planted one."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if k < 0:
        raise ValueError("k must be non-negative")
    if not 0 <= 2 * t_cyc_21 <= d:
        raise ValueError("t_cyc_21 must lie in [0, d/2]")
    if n < 2 or d > n:
        raise ValueError("need 2 <= n and d <= n")
    q1, q2, tau, t_tilde = _q_terms(n, d, k, p, t_cyc_21)
    if k == 0:
        return BoundReport(q1, q2, tau, t_tilde, z_star=math.nan, zeta=math.inf, log_tail_bound=0.0,
                           xi=1.0, d=d, t_cyc_21=t_cyc_21, log_chernoff=0.0)
    if k > n - 1 or (q1 == 0 and q2 == 0):
        # a wrong pair has at most n - 1 neighbours; with q1 = q2 = 0 M is identically 0
        return BoundReport(q1, q2, tau, t_tilde, z_star=math.inf, zeta=0.0, log_tail_bound=-math.inf,
                           xi=0.0, d=d, t_cyc_21=t_cyc_21, log_chernoff=-math.inf)
    # the generating-function bound is quadratic in w = z^2
    w_star, zeta = chernoff_optimize(q1, q2, tau)
    log_tail = min(0.0, tau * math.log(zeta)) if zeta > 0 else -math.inf
    # the generating-function bound holds for w >= 1 and the objective is convex
    log_ch = float(chernoff_objective_log(max(w_star, 1.0), q1, q2, tau))
    return BoundReport(
        q1, q2, tau, t_tilde, math.sqrt(w_star), zeta, log_tail, math.exp(log_tail / d),
        d=d, t_cyc_21=t_cyc_21, log_chernoff=min(0.0, log_ch),
    )


def _log_zeta_grid(n, k, p, d, t):
    q1, q2, tau, _ = _q_terms(n, d, k, p, t)
    with np.errstate(divide="ignore"):
        return np.log(np.maximum(math.sqrt(2) * math.e * q1 / tau, 4 * math.e * np.sqrt(q2 / tau)))


def xi_and_union_bound(n: int, k: int, p: CorrelationParams, exhaustive_t: bool = False) -> BoundReport:
    """Worst per-wrong-pair tail exponent ``xi`` over ``d = 1..n`` and the
    admissible 4-cycle counts, and the union bound ``exp(n^2 xi) - 1``.

    For fixed ``d`` both arguments of the max defining ``zeta`` are monotone in
    the 4-cycle count, so only its two extreme values need evaluating unless
    ``exhaustive_t`` is set.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if k < 0:
        raise ValueError("k must be non-negative")
    nan = math.nan
    if k == 0:
        x = float(n * n)
        return BoundReport(nan, nan, 0.0, nan, nan, zeta=math.inf, log_tail_bound=0.0, xi=1.0,
                           union_bound=math.expm1(x) if x < 700 else math.inf)
    if k > n - 1 or (p.p11 == 0 and p.p1_star * p.p_star1 == 0):
        return BoundReport(nan, nan, nan, nan, nan, zeta=0.0, log_tail_bound=-math.inf, xi=0.0,
                           union_bound=0.0)
    if exhaustive_t:
        d = np.concatenate([np.full(dd // 2 + 1, dd) for dd in range(1, n + 1)]).astype(float)
        t = np.concatenate([np.arange(dd // 2 + 1) for dd in range(1, n + 1)]).astype(float)
    else:
        dd = np.arange(1, n + 1, dtype=float)
        d = np.concatenate([dd, dd])
        t = np.concatenate([np.zeros(n), np.floor(dd / 2)])
    log_zeta = _log_zeta_grid(n, k, p, d, t)
    # (1/d) log Pr[M >= kd] <= (k/2) log zeta, and Pr <= 1
    per_pair = np.minimum(0.0, k / 2 * log_zeta)
    i = int(np.argmax(per_pair))
    best = tail_bound(n, int(d[i]), k, p, int(t[i]))
    xi = math.exp(float(per_pair[i]))
    x = n * n * xi
    union = math.expm1(x) if x < 700 else math.inf
    return BoundReport(
        best.q1, best.q2, best.tau, best.t_tilde, best.z_star, best.zeta, best.log_tail_bound,
        xi, union, d=best.d, t_cyc_21=best.t_cyc_21, log_chernoff=best.log_chernoff,
    )


def recommended_k(n: int, p11: float) -> int:
    """``floor(c (1 - c^(-1/4)))`` with ``c = n p11``."""
    c = n * p11
    if c <= 1:
        raise ValueError(f"n p11 must exceed 1, got {c}")
    return math.floor(c * (1 - c ** (-0.25)))
