"""
Correlated Erdős–Rényi graph pairs.

Every lifted pair ``(w_a, w_b)`` of the planted matching carries one draw of a
correlated Bernoulli pair ``(G_a(w_a), G_b(w_b))`` with joint law ``p``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph, Matching

SPARSE_THRESHOLD = 0.01
SPARSITY_LIMIT = 1.0 / (8.0 * math.e**3)


@dataclass(frozen=True)
class CorrelationParams:
    """Joint law of one aligned edge pair: ``p[i][j] = Pr[G_a = i, G_b = j]``."""

    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self):
        vals = (self.p00, self.p01, self.p10, self.p11)
        for name, v in zip(("p00", "p01", "p10", "p11"), vals):
            if not (v >= 0) or not math.isfinite(v):
                raise ValueError(f"{name} must be a non-negative probability, got {v}")
        if abs(math.fsum(vals) - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1, got {math.fsum(vals)!r}")

    @classmethod
    def independent(cls, pa: float, pb: float) -> "CorrelationParams":
        """Product law: the two edge indicators are independent."""
        return cls((1 - pa) * (1 - pb), (1 - pa) * pb, pa * (1 - pb), pa * pb)

    @classmethod
    def from_p11(cls, p11: float, p01: float = 0.0, p10: float = 0.0) -> "CorrelationParams":
        return cls(1.0 - p11 - p01 - p10, p01, p10, p11)

    @property
    def p1_star(self) -> float:
        """Edge density of ``G_a``."""
        return self.p10 + self.p11

    @property
    def p_star1(self) -> float:
        """Edge density of ``G_b``."""
        return self.p01 + self.p11

    @property
    def positively_correlated(self) -> bool:
        return self.p11 * self.p00 > self.p10 * self.p01

    def matrix(self) -> np.ndarray:
        return np.array([[self.p00, self.p01], [self.p10, self.p11]])

    def cell(self, i: int, j: int) -> float:
        return (self.p00, self.p01, self.p10, self.p11)[2 * i + j]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CorrelationParams":
        keys = {"p00", "p01", "p10", "p11"}
        extra = set(d) - keys
        if extra:
            raise ValueError(f"unknown fields in correlation params: {sorted(extra)}")
        missing = keys - set(d)
        if missing:
            raise ValueError(f"missing fields in correlation params: {sorted(missing)}")
        return cls(**{k: float(d[k]) for k in keys})

    @classmethod
    def load(cls, path) -> "CorrelationParams":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


class SeededRng:
    """Counter-based (Philox) generator keyed by ``(seed, stream)``.

    Distinct streams are statistically independent, so per-trial streams give
    results that do not depend on how trials are scheduled.
    """

    def __init__(self, seed: int = 0, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"SeededRng(seed={self.seed}, stream={self.stream})"


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, SeededRng):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def unrank_pairs(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Map row-major indices into ``{(i, j) : 0 <= i < j < n}`` back to ``(i, j)``."""
    k = np.asarray(idx, dtype=np.int64)
    if k.size == 0:
        return k.copy(), k.copy()

    def start(i):
        return i * (2 * n - i - 1) // 2

    b = 2.0 * n - 1.0
    i = np.floor((b - np.sqrt(np.maximum(b * b - 8.0 * k, 0.0))) / 2.0).astype(np.int64)
    i = np.clip(i, 0, max(n - 2, 0))
    # float rounding can be off by one in either direction
    for _ in range(3):
        hi = start(i + 1) <= k
        i = np.where(hi, i + 1, i)
        lo = start(i) > k
        i = np.where(lo, i - 1, i)
    j = k - start(i) + i + 1
    return i, j


def _sample_cells(N: int, probs, gen: np.random.Generator, method: str):
    """Indices in ``[0, N)`` whose cell is not ``00``, and their cell codes
    (``1 = 01``, ``2 = 10``, ``3 = 11``)."""
    p00, p01, p10, p11 = probs
    q = p01 + p10 + p11
    if method == "auto":
        method = "sparse" if q < SPARSE_THRESHOLD else "dense"
    if N == 0 or q == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int8)
    if method == "dense":
        cum = np.cumsum([p00, p01, p10])
        u = gen.random(N)
        cells = np.searchsorted(cum, u, side="right").astype(np.int8)
        pos = np.flatnonzero(cells)
        return pos.astype(np.int64), cells[pos]
    if method != "sparse":
        raise ValueError(f"unknown sampling method {method!r}")
    # geometric skipping over the pairs whose cell is not 00
    if q >= 1.0:
        pos = np.arange(N, dtype=np.int64)
    else:
        chunks = []
        last = -1
        mean = N * q
        size = int(mean + 6 * math.sqrt(mean) + 16)
        while True:
            gaps = gen.geometric(q, size=size)
            p = last + np.cumsum(gaps)
            chunks.append(p)
            last = int(p[-1])
            if last >= N:
                break
            size = max(16, size // 4)
        pos = np.concatenate(chunks)
        pos = pos[pos < N]
    u = gen.random(pos.size) * q
    cells = np.where(u < p01, 1, np.where(u < p01 + p10, 2, 3)).astype(np.int8)
    return pos, cells


def sample_uniform_bijection(n: int, rng) -> Matching:
    """Uniform random bijection of ``[n]`` onto ``[n]``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    perm = as_generator(rng).permutation(n)
    return Matching.from_permutation(perm.tolist())


def sample_er_graph(n: int, p: float, rng, method: str = "auto") -> Graph:
    """``G(n, p)``."""
    gen = as_generator(rng)
    N = n * (n - 1) // 2
    pos, _ = _sample_cells(N, (1.0 - p, 0.0, 0.0, p), gen, method)
    i, j = unrank_pairs(pos, n)
    return Graph(n, zip(i.tolist(), j.tolist()))


def sample_pair(
    mu_star: Matching,
    p: CorrelationParams,
    rng,
    *,
    n_a: int | None = None,
    n_b: int | None = None,
    strict: bool = True,
    method: str = "auto",
) -> tuple[Graph, Graph]:
    """Draw ``(G_a, G_b) ~ ER(mu_star, p)``.

    With a bijection on ``[n]`` every vertex pair of ``G_a`` is aligned with one
    of ``G_b``.  With ``strict=False`` a partial ``mu_star`` is accepted; vertex
    pairs outside the lifted matching are then drawn independently from the
    marginals ``p1*`` and ``p*1``.
    """
    gen = as_generator(rng)
    n = len(mu_star)
    if n_a is None:
        n_a = max(mu_star.left(), default=-1) + 1
    if n_b is None:
        n_b = max(mu_star.right(), default=-1) + 1
    bijective = mu_star.is_bijection(n_a, n_b)
    if not bijective:
        if strict:
            raise ValueError("mu_star must be a bijection (pass strict=False for partial matchings)")
        return _sample_pair_partial(mu_star, p, gen, n_a, n_b)

    perm = np.array(mu_star.permutation(), dtype=np.int64)
    N = n * (n - 1) // 2
    pos, cells = _sample_cells(N, (p.p00, p.p01, p.p10, p.p11), gen, method)
    i, j = unrank_pairs(pos, n)
    in_a = cells >= 2
    in_b = (cells & 1).astype(bool)
    ea = zip(i[in_a].tolist(), j[in_a].tolist())
    eb = zip(perm[i[in_b]].tolist(), perm[j[in_b]].tolist())
    return Graph(n, ea), Graph(n, eb)


def _sample_pair_partial(mu_star, p, gen, n_a, n_b):
    pairs = mu_star.pairs
    ea, eb = [], []
    lifted_a = set()
    lifted_b = set()
    m = len(pairs)
    if m >= 2:
        ii, jj = np.triu_indices(m, 1)
        cum = np.cumsum([p.p00, p.p01, p.p10])
        cells = np.searchsorted(cum, gen.random(ii.size), side="right")
        for s, t, c in zip(ii.tolist(), jj.tolist(), cells.tolist()):
            (ua, ub), (va, vb) = pairs[s], pairs[t]
            wa = (min(ua, va), max(ua, va))
            wb = (min(ub, vb), max(ub, vb))
            lifted_a.add(wa)
            lifted_b.add(wb)
            if c >= 2:
                ea.append(wa)
            if c & 1:
                eb.append(wb)
    for n_side, lifted, dens, out in ((n_a, lifted_a, p.p1_star, ea), (n_b, lifted_b, p.p_star1, eb)):
        if n_side >= 2:
            ii, jj = np.triu_indices(n_side, 1)
            u = gen.random(ii.size)
            for s, t, x in zip(ii.tolist(), jj.tolist(), u.tolist()):
                if (s, t) not in lifted and x < dens:
                    out.append((s, t))
    return Graph(n_a, ea), Graph(n_b, eb)


# ---------------------------------------------------------------------------
# Parameter regimes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AchievabilityReport:
    density_ok: bool
    sparsity_ok: bool
    correlation_ok: bool
    correlation_term: float
    ratio_defined: bool = True

    @property
    def ok(self) -> bool:
        return self.density_ok and self.sparsity_ok and self.correlation_ok


@dataclass(frozen=True)
class ConverseRegimeReport:
    density_ok: bool
    correlation_ok: bool
    ratio_defined: bool = True

    @property
    def ok(self) -> bool:
        return self.density_ok and self.correlation_ok


def check_achievability_regime(
    n: int, p: CorrelationParams, c_corr: float = 0.25, density_threshold: float = 10.0
) -> AchievabilityReport:
    """Finite-n version of the three conditions under which the k-core
    alignment estimator recovers almost all of the planted matching.

    The asymptotic statements are instantiated as ``n p11 >= density_threshold``,
    ``p11 <= 1/(8 e^3)`` and ``p01 p10 / (p00 p11) + p01 + p10 <= n^-c_corr``.
    The ratio is undefined when ``p00 p11 == 0``; that is reported through
    ``ratio_defined`` and counts as a failed correlation condition.
    """
    if c_corr <= 0:
        raise ValueError("c_corr must be positive")
    density_ok = n * p.p11 >= density_threshold
    sparsity_ok = p.p11 <= SPARSITY_LIMIT
    denom = p.p00 * p.p11
    if denom == 0:
        return AchievabilityReport(density_ok, sparsity_ok, False, math.nan, ratio_defined=False)
    term = p.p01 * p.p10 / denom + p.p01 + p.p10
    return AchievabilityReport(density_ok, sparsity_ok, term <= n ** (-c_corr), term)


def check_converse_regime(n: int, p: CorrelationParams, c_dens: float = 1.0) -> ConverseRegimeReport:
    """``p11 <= c_dens / n`` and strict positive correlation."""
    density_ok = p.p11 <= c_dens / n
    denom = p.p11 * p.p00
    if denom == 0:
        return ConverseRegimeReport(density_ok, False, ratio_defined=False)
    return ConverseRegimeReport(density_ok, p.p01 * p.p10 / denom < 1)


def warn_if_outside_converse_regime(n, p, c_dens=1.0):
    rep = check_converse_regime(n, p, c_dens)
    if not rep.ok:
        warnings.warn(f"parameters outside the converse regime: {rep}", stacklevel=3)
    return rep
