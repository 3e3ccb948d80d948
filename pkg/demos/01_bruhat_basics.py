"""Walk through the basic objects: permutations, prefix-count tables, and
the strong-order comparability test.

Run with: python demos/01_bruhat_basics.py
"""
from bruhatmc import (
    Permutation,
    dominance_table,
    inversion_count,
    is_leq_strong,
    is_leq_weak,
    sample_uniform,
    symmetry_map,
    trial_stream,
    z_table,
)
from bruhatmc.order import covering_successors

# A permutation is stored in one-line notation: p(1), ..., p(n).
p = Permutation((2, 1, 3))
t = Permutation((3, 1, 2))
print("p =", p.values, " t =", t.values)

# The dominance table counts the ones of the permutation matrix in every
# top-left rectangle.  Row/column 0 are zero sentinels, so entry [a, b]
# really is the count for the a x b corner.
print("\ndominance table of p:")
print(dominance_table(p).counts)

# p <= t in the strong Bruhat order iff t's table is dominated by p's
# everywhere, i.e. the difference process Z stays non-negative.
verdict = is_leq_strong(p, t)
print("\np <= t ?", verdict.leq)
print("Z table of the pair:")
print(z_table(p, t).z)

# For an incomparable pair the verdict carries the first violated corner.
bad = is_leq_strong(Permutation((2, 1, 3)), Permutation((1, 3, 2)))
print("\n(2 1 3) <= (1 3 2) ?", bad.leq, " witness corner:", bad.witness)

# Covers raise the inversion count by exactly one.
print("\ncovers of the identity in S_3:")
for q in covering_successors(Permutation.identity(3)):
    print("  ", q.values, " inversions:", inversion_count(q))

# The weak order compares inversion sets and refines the strong order.
print("\nweak order: (2 1 3) <= (2 3 1) ?", is_leq_weak(Permutation((2, 1, 3)), Permutation((2, 3, 1))))

# Sampling is reproducible: streams are keyed by (seed, trial index).
stream = trial_stream(seed=7, trial=0)
u = sample_uniform(6, stream)
v = sample_uniform(6, stream)
print("\nuniform pair from stream (7, 0):", u.values, v.values)
print("u <= v ?", is_leq_strong(u, v).leq)

# Right multiplication by the reversal is order-reversing.
ru = symmetry_map(u, "row-reverse")
rv = symmetry_map(v, "row-reverse")
print("reversal duality: v' <= u' ?", is_leq_strong(rv, ru).leq, "(matches u <= v)")
