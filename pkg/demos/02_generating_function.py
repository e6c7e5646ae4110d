"""Exact generating function of the wrong-pair degree statistic M against
its upper bound and a Monte Carlo estimate, for a two-pair swap."""
import math

from kcore_align import CorrelationParams, Matching, SeededRng, decompose, gf_exact, gf_upper_bound, sample_m_statistic

n = 8
star = Matching.identity(n)
m = Matching([(0, 1), (1, 0)] + [(v, v) for v in range(2, n)])
p = CorrelationParams(0.7, 0.05, 0.05, 0.2)
stats = decompose(m, star)
print("wrong pairs d =", stats.d, " matched n' =", stats.n_prime)

M = sample_m_statistic(m, star, p, 200_000, SeededRng(0))
print(f"{'z':>4} {'exact':>10} {'monte carlo':>12} {'bound':>10}")
for z in (0.5, 1.0, 1.5, 2.0, 3.0):
    vals = z ** M.astype(float)
    print(f"{z:>4} {gf_exact(stats, p, z):>10.5f} {vals.mean():>12.5f} "
          f"{gf_upper_bound(stats, p, z) if z >= 1 else math.nan:>10.5f}")
