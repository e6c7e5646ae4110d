"""
Diagnostics for the impossibility side: exact posteriors on tiny instances,
automorphism-derived matchings, list-estimator bounds and isolated-vertex
statistics of the true intersection graph.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from itertools import permutations

import numpy as np

from .errors import InvariantError
from .graph import Graph, Matching, aligned_intersection
from .model import (
    CorrelationParams,
    _sample_cells,
    as_generator,
    unrank_pairs,
    warn_if_outside_converse_regime,
)


@dataclass(frozen=True)
class PosteriorTable:
    """Posterior over bijections ``[n] -> [n]``; ``perms[r]`` is the image list
    of the bijection with probability ``probs[r]``."""

    n: int
    perms: np.ndarray
    log_probs: np.ndarray

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_probs)

    @property
    def entries(self) -> dict:
        return {tuple(int(v) for v in row): float(q) for row, q in zip(self.perms, self.probs)}

    def _row(self, m: Matching) -> int:
        if not m.is_bijection(self.n):
            raise ValueError("posterior is only defined on bijections")
        # perms are in lexicographic order, so the row is the permutation's rank
        perm = m.permutation()
        rank, remaining = 0, list(range(self.n))
        for i, v in enumerate(perm):
            j = remaining.index(v)
            rank += j * math.factorial(self.n - 1 - i)
            remaining.pop(j)
        return rank

    def log_prob(self, m: Matching) -> float:
        return float(self.log_probs[self._row(m)])

    def prob(self, m: Matching) -> float:
        return math.exp(self.log_prob(m))

    def argmax(self, tol: float = 1e-9) -> Matching:
        """Lexicographically first bijection within ``tol`` (in log space) of the maximum."""
        best = np.flatnonzero(self.log_probs >= self.log_probs.max() - tol)[0]
        return Matching.from_permutation(self.perms[best].tolist())


def exact_posterior(Ga: Graph, Gb: Graph, p: CorrelationParams, n_limit: int = 7) -> PosteriorTable:
    """``Pr[mu = . | Ga, Gb]`` under a uniform prior, by enumerating all bijections."""
    if Ga.n != Gb.n:
        raise ValueError("graphs must have the same order")
    n = Ga.n
    if n > n_limit:
        raise ValueError(f"exact posterior limited to n <= {n_limit}")
    if min(p.p00, p.p01, p.p10, p.p11) <= 0:
        raise ValueError("exact posterior needs every cell of p to be positive")
    L = np.log(p.matrix()).ravel()
    A = Ga.adjacency_matrix().astype(np.int64)
    B = Gb.adjacency_matrix().astype(np.int64)
    perms = np.array(list(permutations(range(n))), dtype=np.int64).reshape(-1, n)
    iu, ju = np.triu_indices(n, 1)
    codes = 2 * A[iu, ju][None, :] + B[perms[:, iu], perms[:, ju]]
    ll = L[codes].sum(axis=1)
    ll = ll - ll.max()
    log_z = math.log(math.fsum(np.exp(ll)))
    return PosteriorTable(n, perms, ll - log_z)


def gamma_extract(pi, m: Matching) -> Matching:
    """Matching read off a permutation of ``m``'s pairs: each pair ``u`` sent to
    ``v`` contributes ``(u_a, v_b)``.

    ``pi`` is either a sequence of indices into ``m.pairs`` or a mapping from
    pairs to pairs.
    """
    pairs = m.pairs
    if isinstance(pi, dict):
        image = [pi[u] for u in pairs]
    else:
        if sorted(pi) != list(range(len(pairs))):
            raise ValueError("pi must be a permutation of the pair indices")
        image = [pairs[j] for j in pi]
    return Matching((u[0], v[1]) for u, v in zip(pairs, image))


def automorphisms(G: Graph, limit: int = 8) -> list[tuple[int, ...]]:
    """All automorphisms of ``G`` by brute force, as image tuples."""
    n = G.n
    if n > limit:
        raise ValueError(f"automorphism enumeration limited to n <= {limit}")
    A = G.adjacency_matrix()
    perms = np.array(list(permutations(range(n))), dtype=np.int64).reshape(-1, n)
    ok = (A[perms[:, :, None], perms[:, None, :]] == A).all(axis=(1, 2))
    return [tuple(int(v) for v in row) for row in perms[ok]]


@dataclass(frozen=True)
class AutomorphismPosteriorReport:
    holds: bool
    n_automorphisms: int
    contains_m: bool
    min_log_ratio: float

    def __bool__(self):
        return self.holds


def verify_lemma_intersection(
    Ga: Graph, Gb: Graph, m: Matching, p: CorrelationParams, n_limit: int = 7, tol: float = 1e-9
) -> AutomorphismPosteriorReport:
    """Check that every automorphism ``pi`` of ``Ga ^_m Gb`` yields a matching
    ``gamma(pi)`` at least as probable a posteriori as ``m``."""
    if not p.positively_correlated:
        raise ValueError("requires positive correlation")
    post = exact_posterior(Ga, Gb, p, n_limit)
    base = post.log_prob(m)
    auts = automorphisms(aligned_intersection(Ga, Gb, m), limit=n_limit)
    ratios = []
    contains_m = False
    for pi in auts:
        g = gamma_extract(pi, m)
        contains_m |= g == m
        ratios.append(post.log_prob(g) - base)
    min_ratio = min(ratios) if ratios else 0.0
    return AutomorphismPosteriorReport(min_ratio >= -tol, len(auts), contains_m, min_ratio)


def max_list_success(dist, ell: int, tol: float = 1e-12) -> tuple[float, float]:
    """Best success probability of a size-``ell`` guess list for ``Y ~ dist``,
    and the bound ``E[min(1, ell / #{y' : P(y') >= P(Y)})]``.

    Raises :class:`InvariantError` if the first exceeds the second.
    """
    if ell < 0:
        raise ValueError("ell must be non-negative")
    q = np.asarray(list(dist.values()) if isinstance(dist, dict) else dist, dtype=float)
    if (q < 0).any():
        raise ValueError("probabilities must be non-negative")
    desc = np.sort(q)[::-1]
    best = math.fsum(desc[:ell])
    # #{y' : P(y') >= P(y)} via a search in the ascending order
    asc = desc[::-1]
    at_least = q.size - np.searchsorted(asc, q, side="left")
    rhs = math.fsum(q * np.minimum(1.0, ell / at_least))
    if best > rhs + tol:
        raise InvariantError(f"list bound violated: best {best} > {rhs}")
    return best, rhs


def _er_edge_arrays(n: int, p: float, gen: np.random.Generator):
    pos, _ = _sample_cells(n * (n - 1) // 2, (1.0 - p, 0.0, 0.0, p), gen, "auto")
    return unrank_pairs(pos, n)


def _isolated(n: int, i: np.ndarray, j: np.ndarray) -> int:
    deg = np.bincount(np.concatenate([i, j]), minlength=n)
    return int((deg == 0).sum())


@dataclass(frozen=True)
class IsolatedStats:
    mean: float
    expected: float
    stderr: float
    z_score: float
    trials: int

    def to_dict(self) -> dict:
        return asdict(self)


def isolated_stats(n: int, p11: float, trials: int, rng) -> IsolatedStats:
    """Isolated-vertex count of ``G(n, p11)`` against ``n (1 - p11)^(n - 1)``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    gen = as_generator(rng)
    counts = np.array([_isolated(n, *_er_edge_arrays(n, p11, gen)) for _ in range(trials)], dtype=float)
    mean = float(counts.mean())
    expected = n * (1 - p11) ** (n - 1)
    stderr = float(counts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    if stderr > 0:
        z = (mean - expected) / stderr
    else:
        z = 0.0 if math.isclose(mean, expected, abs_tol=1e-9) else math.inf
    return IsolatedStats(mean, expected, stderr, z, trials)


@dataclass(frozen=True)
class ConverseReport:
    """``isolated_count``, ``aut_lower_log`` and ``aut_exact`` describe the first
    sampled intersection graph; ``success_bound`` averages over all trials."""

    isolated_count: int
    aut_lower_log: float
    aut_exact: int | None
    list_len: int | None
    list_len_log: float
    success_bound: float
    mean_isolated: float
    trials: int
    isolated_counts: list = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 <= self.success_bound <= 1.0:
            raise InvariantError(f"success bound {self.success_bound} outside [0, 1]")
        if self.aut_exact is not None and math.log(self.aut_exact) < self.aut_lower_log - 1e-9:
            raise InvariantError("exact automorphism count below the isolated-vertex bound")

    def to_dict(self) -> dict:
        return asdict(self)


def partial_recovery_converse_check(
    n: int, p: CorrelationParams, eps: int, trials: int, rng, c_dens: float = 1.0
) -> ConverseReport:
    """Upper bound on the success probability of any estimator that leaves at
    most ``eps`` vertices unmatched and never errs.

    Each trial draws the true intersection graph, which is ``G(n, p11)``, and
    counts its isolated vertices ``j``; any permutation of them is an
    automorphism, giving the per-trial bound ``min(1, eps! / j!)``.
    """
    if not 0 <= eps <= n:
        raise ValueError("eps must lie in [0, n]")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    warn_if_outside_converse_regime(n, p, c_dens)
    gen = as_generator(rng)
    log_list = math.lgamma(eps + 1)
    counts, terms = [], []
    aut_exact = None
    for t in range(trials):
        i, j = _er_edge_arrays(n, p.p11, gen)
        c = _isolated(n, i, j)
        counts.append(c)
        terms.append(math.exp(min(0.0, log_list - math.lgamma(c + 1))))
        if t == 0 and n <= 8:
            aut_exact = len(automorphisms(Graph(n, zip(i.tolist(), j.tolist()))))
    return ConverseReport(
        isolated_count=counts[0],
        aut_lower_log=math.lgamma(counts[0] + 1),
        aut_exact=aut_exact,
        list_len=math.factorial(eps) if eps < 20 else None,
        list_len_log=log_list,
        success_bound=min(1.0, math.fsum(terms) / trials),
        mean_isolated=float(np.mean(counts)),
        trials=trials,
        isolated_counts=counts,
    )
