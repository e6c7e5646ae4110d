"""End-to-end acceptance checks.  Each test prints one ``PASS``/``FAIL`` line."""
import json
import math
import time

import numpy as np
import pytest

from _instances import five_vertex_pair, random_graph, random_params, random_partial_matching, random_positive_params
from kcore_align import (
    CorrelationParams,
    Matching,
    SeededRng,
    a_poly,
    a_poly_cyclic,
    aligned_intersection,
    b_poly,
    b_poly_cyclic,
    chernoff_optimize,
    decompose,
    enumerate_k_core_alignments,
    exact_posterior,
    gf_exact,
    gf_upper_bound,
    is_k_core_alignment,
    isolated_stats,
    k_core,
    max_list_success,
    min_degree,
    oracle_kcore_estimate,
    partial_recovery_converse_check,
    recommended_k,
    sample_m_statistic,
    sample_pair,
    sample_uniform_bijection,
    tail_bound,
    verify_lemma_intersection,
    xi_and_union_bound,
)
from kcore_align import cli
from kcore_align.bounds import chernoff_objective_log
from kcore_align.decomposition import imposter_matching
from kcore_align.oracles import gf_bruteforce, kcore_bruteforce


@pytest.fixture
def report(capsys):
    start = time.perf_counter()

    def emit(number, ok, detail):
        with capsys.disabled():
            status = "PASS" if ok else "FAIL"
            print(f"\n{status} criterion {number}: {detail} [{time.perf_counter() - start:.2f} s]")
        assert ok, detail

    return emit


def test_criterion_01_small_pair_alignment(report):
    Ga, Gb, mu = five_vertex_pair()
    G = aligned_intersection(Ga, Gb, mu)
    degrees = tuple(G.degree(i) for i in range(G.n))
    bigger = mu.union([(4, 3)])
    G2 = aligned_intersection(Ga, Gb, bigger)
    ok = (bool(is_k_core_alignment(Ga, Gb, mu, 2)) and min_degree(G) == 2 and G.num_edges == 5
          and degrees == (3, 2, 3, 2) and min_degree(G2) == 0)
    report(1, ok, f"2-core alignment, {G.num_edges} edges, degrees {degrees}, extended min degree {min_degree(G2)}")


def test_criterion_02_kcore_oracle(report):
    gen = np.random.default_rng(2)
    mismatches = 0
    for i in range(200):
        n = int(gen.integers(1, 13))
        G = random_graph(n, float(gen.uniform(0.1, 0.9)), gen)
        k = 1 + i % 3
        mismatches += k_core(G, k) != kcore_bruteforce(G, k)
    report(2, mismatches == 0, f"{mismatches} mismatches over 200 graphs")


def test_criterion_03_gf_exactness(report):
    gen = np.random.default_rng(3)
    worst, count = 0.0, 0
    while count < 50:
        n = int(gen.integers(2, 6))
        star = Matching.from_permutation(gen.permutation(n).tolist())
        m = random_partial_matching(n, gen)
        p = random_params(gen)
        stats = decompose(m, star)
        assert stats.n_prime <= 5
        for z in (0.5, 1.0, 2.0, 3.0):
            ref = gf_bruteforce(m, star, p, z)
            worst = max(worst, abs(gf_exact(stats, p, z) - ref) / abs(ref))
        count += 1
    report(3, worst <= 1e-10, f"max relative error {worst:.2e} over 50 instances")


def test_criterion_04_transfer_inequalities(report):
    violations = 0
    tol = 1e-12
    for x in np.linspace(-5, 5, 41):
        for y in np.linspace(1, 10, 19):
            violations += y * y * x * x + (4 - 2 * y) * x + 1 < -tol
            c2 = b_poly_cyclic(2, x, y)
            for l in range(2, 11):
                violations += b_poly_cyclic(l, x, y) > c2 ** (l / 2) * (1 + tol) + tol
    for x in np.linspace(0, 5, 21):
        for y in np.linspace(1, 10, 19):
            c2 = b_poly_cyclic(2, x, y)
            for l in range(1, 11):
                violations += b_poly(l, x, y) ** 2 > c2**l * (1 + tol)
    gen = np.random.default_rng(4)
    for _ in range(50):
        p = random_positive_params(gen)
        for z in np.linspace(1, 6, 11):
            c2 = a_poly_cyclic(2, z, p)
            for l in range(1, 11):
                violations += a_poly(l, z, p) ** 2 > c2**l * (1 + tol)
                if l >= 2:
                    violations += a_poly_cyclic(l, z, p) ** 2 > c2**l * (1 + tol)
    worst = 0.0
    for _ in range(500):
        p = random_params(gen)
        s = p.p1_star * p.p_star1
        if s == 0:
            continue
        z, l = float(gen.uniform(0, 5)), int(gen.integers(1, 13))
        x, y = s * (z - 1), p.p11 / s
        for a, b in ((a_poly(l, z, p), b_poly(l, x, y)), (a_poly_cyclic(l, z, p), b_poly_cyclic(l, x, y))):
            err = abs(a - b) / max(abs(b), 1e-300)
            worst = max(worst, err)
            violations += err > 1e-12 and abs(a - b) > 1e-14
    report(4, violations == 0, f"{violations} violations; reduction max relative error {worst:.1e}")


def test_criterion_05_upper_bound_domination(report):
    gen = np.random.default_rng(5)
    violations = 0
    for _ in range(100):
        n = int(gen.integers(2, 9))
        star = Matching.from_permutation(gen.permutation(n).tolist())
        m = random_partial_matching(n, gen)
        p = random_positive_params(gen)
        s = decompose(m, star)
        for z in (1.1, 2.0, 5.0):
            violations += gf_upper_bound(s, p, z) < gf_exact(s, p, z) * (1 - 1e-12)
    report(5, violations == 0, f"{violations} violations over 100 instances")


def test_criterion_06_chernoff_optimum(report):
    gen = np.random.default_rng(6)
    bad_bound = bad_stationary = 0
    worst = 0.0
    for _ in range(1000):
        q1, q2 = gen.exponential(2.0, size=2) * (gen.random(2) < 0.9)
        if q1 == 0 and q2 == 0:
            q1 = 1.0
        tau = float(gen.uniform(0.1, 50))
        z, zeta = chernoff_optimize(q1, q2, tau)
        res = abs(2 * q2 * z * z + q1 * z - tau)
        worst = max(worst, res / tau)
        bad_stationary += res > 1e-9 * tau
        grid = np.linspace(z * 1e-3, 10 * z, 4001)
        gmin = float(chernoff_objective_log(grid, q1, q2, tau).min())
        bad_bound += gmin > tau * math.log(zeta) + 1e-9 * max(1.0, abs(tau * math.log(zeta)))
    report(6, bad_bound == 0 and bad_stationary == 0,
           f"bound violations {bad_bound}, stationarity violations {bad_stationary}, max residual/tau {worst:.1e}")


TAIL_CONFIGS = [  # n, d, t_cyc_21, p11, k
    (200, 3, 1, 0.02, 8),
    (30, 2, 1, 0.3, 3),
    (40, 4, 2, 0.25, 4),
    (120, 4, 0, 0.05, 2),
    (100, 1, 0, 0.1, 4),
]


def test_criterion_07_tail_domination(report):
    lines, ok = [], True
    for i, (n, d, t, p11, k) in enumerate(TAIL_CONFIGS):
        p = CorrelationParams.from_p11(p11)
        m = imposter_matching(n, d, t)
        star = Matching.identity(n)
        stats = decompose(m, star)
        assert stats.d == d and stats.t_cyc.get(2, {}).get(1, 0) == t
        M = sample_m_statistic(m, star, p, 100_000, SeededRng(7, i))
        hits = (M >= k * d).astype(float)
        mc, se = hits.mean(), hits.std(ddof=1) / math.sqrt(hits.size)
        rep = tail_bound(n, d, k, p, t)
        bound = rep.tail_bound
        chern = math.exp(rep.log_chernoff)
        ok &= mc <= bound + 3 * se and mc <= chern + 3 * se
        lines.append(f"(n={n},d={d},k={k}) mc={mc:.5f} zeta-bound={bound:.4g} chernoff={chern:.4g}")
    report(7, ok, "; ".join(lines))


def test_criterion_08_kcore_size(report):
    n, c = 10_000, 40
    p = CorrelationParams.from_p11(c / n)
    k = recommended_k(n, p.p11)
    threshold = n * (1 - math.exp(-c**0.25))
    sizes = []
    for t in range(20):
        rng = SeededRng(8, t)
        star = sample_uniform_bijection(n, rng)
        Ga, Gb = sample_pair(star, p, rng)
        sizes.append(len(oracle_kcore_estimate(Ga, Gb, star, k)))
    frac = sum(s >= threshold for s in sizes) / len(sizes)
    frac_926 = sum(s >= 0.926 * n for s in sizes) / len(sizes)
    report(8, k == 24 and frac >= 0.95,
           f"k={k}, min size {min(sizes)}, threshold {threshold:.0f}, "
           f"{frac:.0%} of trials above it ({frac_926:.0%} above 0.926n)")


def test_criterion_09_exhaustive_phenomenology(report):
    n, k = 7, 3
    p = CorrelationParams(0.5, 0.0, 0.0, 0.5)
    union = xi_and_union_bound(n, k, p).union_bound
    wrong_trials = 0
    truth_always = True
    for t in range(200):
        rng = SeededRng(9, t)
        star = sample_uniform_bijection(n, rng)
        Ga, Gb = sample_pair(star, p, rng)
        found = enumerate_k_core_alignments(Ga, Gb, k, n_limit=n)
        wrong_trials += any(not m.as_set() <= star.as_set() for m in found)
        truth_always &= oracle_kcore_estimate(Ga, Gb, star, k) in found
    frac = wrong_trials / 200
    report(9, frac < union and truth_always,
           f"wrong-alignment fraction {frac:.3f} vs union bound {union:.3g}, truth always listed: {truth_always}")


def test_criterion_10_converse_suite(report):
    gen = np.random.default_rng(10)
    for _ in range(1000):
        size = int(gen.integers(1, 13))
        q = gen.dirichlet(np.full(size, gen.uniform(0.1, 3)))
        max_list_success(q, int(gen.integers(0, 13)))
    pos = CorrelationParams(0.7, 0.05, 0.05, 0.2)
    held = 0
    for s in range(100):
        star = sample_uniform_bijection(5, SeededRng(10, 2 * s))
        Ga, Gb = sample_pair(star, pos, SeededRng(10, 2 * s + 1))
        held += verify_lemma_intersection(Ga, Gb, star, pos).holds
    iso = isolated_stats(100, 0.01, 10_000, SeededRng(10, 1000))
    n = 10_000
    conv = partial_recovery_converse_check(n, CorrelationParams.from_p11(1 / n), 0, 100, SeededRng(10, 1001))
    ok = held == 100 and abs(iso.mean - 36.973) <= 3 * iso.stderr and conv.success_bound <= 1e-3
    report(10, ok, f"list bound ok on 1000 laws, intersection property {held}/100, isolated mean "
                   f"{iso.mean:.3f} (se {iso.stderr:.3f}), converse bound {conv.success_bound:.2e}")


DETERMINISM_CONFIGS = {
    "oracle_kcore": {"n": [200], "p": {"np11": [4, 8]}, "k": 2, "trials": 4},
    "exhaustive_align": {"n": [6], "p": {"p00": 0.5, "p01": 0.0, "p10": 0.0, "p11": 0.5}, "k": 2, "trials": 4},
    "gf_verify": {"n": [5], "p": {"p00": 0.6, "p01": 0.1, "p10": 0.1, "p11": 0.2}, "trials": 4},
    "bound_eval": {"n": [100, 1000], "p": {"np11": [10, 20]}},
    "converse": {"n": [500], "p": {"np11": 1}, "trials": 6, "eps": 2},
    "sweep": {"n": [300], "p": {"np11": [5, 10]}, "k": 3, "trials": 3},
}


def test_criterion_11_determinism(report, tmp_path):
    identical = []
    for kind, body in DETERMINISM_CONFIGS.items():
        cfg = tmp_path / f"{kind}.json"
        cfg.write_text(json.dumps({"kind": kind, "seed": 11, **body}))
        outs = []
        for jobs in (1, 8):
            out = tmp_path / f"{kind}-{jobs}.csv"
            assert cli.main(["sweep", "--config", str(cfg), "--jobs", str(jobs), "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        identical.append(outs[0] == outs[1])
    report(11, all(identical), f"{sum(identical)}/{len(identical)} experiment kinds byte-identical across --jobs 1/8")
