"""Walk through a five-vertex instance: aligned intersection, k-core check,
an extension that breaks it, and every 2-core alignment of the pair."""
from kcore_align import Graph, Matching, aligned_intersection, enumerate_k_core_alignments, is_k_core_alignment
from kcore_align.graph import min_degree

Ga = Graph(5, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 4)])
Gb = Graph(5, [(0, 1), (1, 4), (2, 4), (0, 2), (1, 2), (2, 3)])
mu = Matching([(0, 2), (1, 0), (2, 1), (3, 4)])

G = aligned_intersection(Ga, Gb, mu)
print("pairs:", mu.pairs)
print("intersection edges:", sorted(G.edges))
print("degrees:", [G.degree(i) for i in range(G.n)])
print("2-core alignment?", bool(is_k_core_alignment(Ga, Gb, mu, 2)))

bigger = mu.union([(4, 3)])
verdict = is_k_core_alignment(Ga, Gb, bigger, 2)
print("after adding (4, 3): min degree", min_degree(aligned_intersection(Ga, Gb, bigger)),
      "violating pair", verdict.violating_vertex)

found = enumerate_k_core_alignments(Ga, Gb, 2)
print(len(found), "2-core alignments in total, mu among them:", mu in found)
for m in found[:5]:
    print("  ", m.pairs)
