"""Union bound on wrong k-core alignments for growing n at fixed mean
intersection degree, next to the isolated-vertex obstruction."""
from kcore_align import CorrelationParams, SeededRng, partial_recovery_converse_check, recommended_k, xi_and_union_bound

c = 100.0
print("achievability side, n p11 =", c)
for n in (10**4, 10**5, 10**6):
    p = CorrelationParams.from_p11(c / n)
    k = recommended_k(n, p.p11)
    rep = xi_and_union_bound(n, k, p)
    print(f"  n={n:>8} k={k} xi={rep.xi:.3e} union bound={rep.union_bound:.3e}")

print("converse side, n p11 = 1 (about n/e isolated vertices)")
for n in (50, 500, 5000):
    p = CorrelationParams.from_p11(1.0 / n)
    for eps in (0, n // 10):
        rep = partial_recovery_converse_check(n, p, eps, 200, SeededRng(1))
        print(f"  n={n:>5} eps={eps:>4} mean isolated={rep.mean_isolated:8.1f} success bound={rep.success_bound:.3e}")
