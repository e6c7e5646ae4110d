import math
import warnings
from collections import Counter
from itertools import combinations

import numpy as np
import pytest
from scipy import stats

from kcore_align import (
    CorrelationParams,
    Graph,
    Matching,
    SeededRng,
    aligned_intersection,
    check_achievability_regime,
    check_converse_regime,
    sample_pair,
    sample_uniform_bijection,
)
from kcore_align.model import SPARSITY_LIMIT, _sample_cells, sample_er_graph, unrank_pairs


class TestCorrelationParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            CorrelationParams(0.5, 0.5, 0.5, -0.5)
        with pytest.raises(ValueError):
            CorrelationParams(0.5, 0.2, 0.2, 0.2)
        with pytest.raises(ValueError):
            CorrelationParams(float("nan"), 0, 0, 1)

    def test_marginals(self):
        p = CorrelationParams(0.7, 0.1, 0.05, 0.15)
        assert p.p1_star == pytest.approx(0.2)
        assert p.p_star1 == pytest.approx(0.25)
        assert p.positively_correlated

    def test_independent_is_not_positive(self):
        p = CorrelationParams.independent(0.3, 0.4)
        assert not p.positively_correlated

    def test_dict_roundtrip_and_strictness(self):
        p = CorrelationParams(0.7, 0.1, 0.05, 0.15)
        assert CorrelationParams.from_dict(p.to_dict()) == p
        with pytest.raises(ValueError):
            CorrelationParams.from_dict({**p.to_dict(), "q": 1})
        with pytest.raises(ValueError):
            CorrelationParams.from_dict({"p00": 1})


class TestRng:
    def test_same_stream_same_samples(self):
        a = SeededRng(42, 3).generator.random(5)
        b = SeededRng(42, 3).generator.random(5)
        assert (a == b).all()

    def test_streams_differ(self):
        a = SeededRng(42, 3).generator.random(5)
        b = SeededRng(42, 4).generator.random(5)
        assert not (a == b).any()

    def test_pair_determinism(self):
        p = CorrelationParams.from_p11(0.1, 0.05, 0.05)
        mu = sample_uniform_bijection(40, SeededRng(1, 0))
        assert sample_pair(mu, p, SeededRng(9, 2)) == sample_pair(mu, p, SeededRng(9, 2))


class TestSampling:
    def test_unrank_pairs(self):
        n = 7
        want = list(combinations(range(n), 2))
        i, j = unrank_pairs(np.arange(len(want)), n)
        assert list(zip(i.tolist(), j.tolist())) == want

    def test_all_zero_cell(self):
        Ga, Gb = sample_pair(Matching.identity(6), CorrelationParams(1, 0, 0, 0), SeededRng(0, 0))
        assert Ga.num_edges == 0 and Gb.num_edges == 0

    def test_all_one_cell(self):
        mu = sample_uniform_bijection(6, SeededRng(0, 1))
        Ga, Gb = sample_pair(mu, CorrelationParams(0, 0, 0, 1), SeededRng(0, 0))
        assert Ga == Graph.complete(6) and Gb == Graph.complete(6)
        assert aligned_intersection(Ga, Gb, mu) == Graph.complete(6)

    def test_non_bijection_rejected_in_strict_mode(self):
        with pytest.raises(ValueError):
            sample_pair(Matching([(0, 1)]), CorrelationParams(0.5, 0, 0, 0.5), SeededRng(), n_a=3, n_b=3)

    def test_partial_matching_marginals(self):
        p = CorrelationParams(0.4, 0.1, 0.2, 0.3)
        m = Matching([(0, 2), (1, 0), (3, 3)])
        ga_tot = gb_tot = 0
        trials = 3000
        for t in range(trials):
            Ga, Gb = sample_pair(m, p, SeededRng(5, t), n_a=5, n_b=4, strict=False)
            assert Ga.n == 5 and Gb.n == 4
            ga_tot += Ga.num_edges
            gb_tot += Gb.num_edges
        for tot, pairs, dens in ((ga_tot, 10, p.p1_star), (gb_tot, 6, p.p_star1)):
            N = trials * pairs
            assert abs(tot / N - dens) < 4 * math.sqrt(dens * (1 - dens) / N)

    def test_joint_cell_frequencies_per_lifted_pair(self):
        # n = 4, uniform p: each aligned pair lands in each cell with probability 1/4
        p = CorrelationParams(0.25, 0.25, 0.25, 0.25)
        mu = Matching([(0, 2), (1, 0), (2, 3), (3, 1)])
        trials = 100_000
        rng = SeededRng(11, 0)
        counts = {w: Counter() for w in combinations(range(4), 2)}
        perm = mu.as_dict()
        for _ in range(trials):
            Ga, Gb = sample_pair(mu, p, rng)
            for w in counts:
                counts[w][(Ga.has_edge(*w), Gb.has_edge(perm[w[0]], perm[w[1]]))] += 1
        sigma = math.sqrt(0.25 * 0.75 / trials)
        for w, c in counts.items():
            for cell in [(False, False), (False, True), (True, False), (True, True)]:
                assert abs(c[cell] / trials - 0.25) < 3 * sigma, (w, cell)

    def test_marginals_and_intersection_density(self):
        p = CorrelationParams(0.8, 0.05, 0.07, 0.08)
        n, trials = 12, 10_000
        N = trials * n * (n - 1) // 2
        ea = eb = ei = 0
        for t in range(trials):
            rng = SeededRng(3, t)
            mu = sample_uniform_bijection(n, rng)
            Ga, Gb = sample_pair(mu, p, rng)
            ea += Ga.num_edges
            eb += Gb.num_edges
            ei += aligned_intersection(Ga, Gb, mu).num_edges
        for tot, dens in ((ea, p.p1_star), (eb, p.p_star1), (ei, p.p11)):
            assert abs(tot / N - dens) < 3 * math.sqrt(dens * (1 - dens) / N)

    def test_lifted_pairs_uncorrelated(self):
        p = CorrelationParams(0.5, 0.1, 0.1, 0.3)
        mu = Matching.identity(3)
        trials = 20_000
        x = np.empty(trials)
        y = np.empty(trials)
        for t in range(trials):
            Ga, Gb = sample_pair(mu, p, SeededRng(8, t))
            x[t] = Ga.has_edge(0, 1) and Gb.has_edge(0, 1)
            y[t] = Ga.has_edge(1, 2) and Gb.has_edge(1, 2)
        cov = np.mean(x * y) - x.mean() * y.mean()
        # standard error of the covariance estimate for independent indicators
        se = math.sqrt(p.p11 * (1 - p.p11)) ** 2 / math.sqrt(trials)
        assert abs(cov) < 3 * se

    @pytest.mark.parametrize("probs", [(0.995, 0.001, 0.0015, 0.0025), (0.6, 0.1, 0.1, 0.2)])
    def test_dense_and_sparse_agree(self, probs):
        N, reps = 500, 400
        tallies = {}
        for method in ("dense", "sparse"):
            gen = np.random.default_rng(7 if method == "dense" else 8)
            cells = np.zeros(4, dtype=np.int64)
            per_pos = np.zeros(N, dtype=np.int64)
            for _ in range(reps):
                pos, c = _sample_cells(N, probs, gen, method)
                assert (np.diff(pos) > 0).all() and (pos < N).all()
                cells[1:] += np.bincount(c, minlength=4)[1:]
                per_pos[pos] += 1
            cells[0] = N * reps - cells[1:].sum()
            tallies[method] = cells
            # each method matches the target law
            expected = np.array(probs) * N * reps
            assert stats.chisquare(cells, expected).pvalue > 1e-3
        # and the two methods agree with each other
        table = np.vstack([tallies["dense"], tallies["sparse"]])
        table = table[:, table.sum(axis=0) > 0]
        assert stats.chi2_contingency(table).pvalue > 1e-3

    def test_sparse_positions_uniform(self):
        N, q, reps = 200, 0.005, 4000
        gen = np.random.default_rng(4)
        hits = np.zeros(N)
        for _ in range(reps):
            pos, _ = _sample_cells(N, (1 - q, 0, 0, q), gen, "sparse")
            hits[pos] += 1
        buckets = hits.reshape(10, 20).sum(axis=1)
        assert stats.chisquare(buckets).pvalue > 1e-3

    def test_er_graph_density(self):
        G = sample_er_graph(2000, 0.002, SeededRng(0, 0))
        N = 2000 * 1999 / 2
        assert abs(G.num_edges - N * 0.002) < 4 * math.sqrt(N * 0.002)

    def test_uniform_bijection(self):
        assert len(sample_uniform_bijection(0, SeededRng())) == 0
        assert sample_uniform_bijection(1, SeededRng()) == Matching([(0, 0)])
        gen = SeededRng(2, 0)
        counts = Counter(tuple(sample_uniform_bijection(3, gen).permutation()) for _ in range(60_000))
        assert len(counts) == 6
        sigma = math.sqrt(60_000 * (1 / 6) * (5 / 6))
        for c in counts.values():
            assert abs(c - 10_000) < 3 * sigma


class TestRegimes:
    def test_sparsity_boundary_inclusive(self):
        rep = check_achievability_regime(1000, CorrelationParams.from_p11(SPARSITY_LIMIT))
        assert rep.sparsity_ok
        assert SPARSITY_LIMIT == pytest.approx(1 / (8 * math.e**3))

    def test_noise_free(self):
        rep = check_achievability_regime(100, CorrelationParams.from_p11(0.001), c_corr=5.0)
        assert rep.correlation_ok and rep.correlation_term == 0

    def test_numeric_example(self):
        p = CorrelationParams(0.9959, 0.0002, 0.0002, 0.0037)
        rep = check_achievability_regime(10**4, p, c_corr=0.25)
        term = 0.0002**2 / (0.9959 * 0.0037) + 0.0004
        assert rep.correlation_term == pytest.approx(term, rel=1e-12)
        assert rep.correlation_term < 10**4 ** -0.25
        assert rep.correlation_ok and rep.sparsity_ok and rep.density_ok

    def test_undefined_ratio_flagged(self):
        rep = check_achievability_regime(100, CorrelationParams(0.9, 0.1, 0.0, 0.0))
        assert not rep.ratio_defined and not rep.correlation_ok

    def test_converse_regime(self):
        n = 1000
        assert check_converse_regime(n, CorrelationParams.from_p11(1 / n)).ok
        boundary = CorrelationParams.independent(0.001, 0.001)
        assert not check_converse_regime(n, boundary).correlation_ok
        assert not check_converse_regime(n, CorrelationParams.from_p11(0.5)).density_ok
