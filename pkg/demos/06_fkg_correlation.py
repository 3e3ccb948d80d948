"""Positive correlation of increasing events in the strong Bruhat order,
checked in exact rational arithmetic.

Run with: python demos/06_fkg_correlation.py
"""
from bruhatmc import Permutation, fkg_check, random_upset, trial_stream, upward_closure
from bruhatmc.fkg import ProductEvent, fkg_product_check
from bruhatmc.order import is_leq_strong

# An up-set is an event closed upward in the order; here, everything above
# the transposition (2 1 3 4).
up = upward_closure(4, [Permutation((2, 1, 3, 4))])
print(f"up-set above (2 1 3 4): {up.members.bit_count()} of 24 permutations, P = {up.probability}")

# Any two up-sets are positively correlated; the probabilities are exact
# rationals, so holds=False could only ever mean a bug.
stream = trial_stream(9)
print("\nrandom up-set pairs at n=4:")
for i in range(5):
    a, b = random_upset(4, stream), random_upset(4, stream)
    r = fkg_check(a, b)
    print(f"  P(A)={str(a.probability):>7}  P(B)={str(b.probability):>7}  "
          f"P(AB)={str(r.lhs):>7}  P(A)P(B)={str(r.rhs):>9}  holds={r.holds}")

# Product-space version: events over pairs (p, t), monotone per coordinate.
# Comparability itself is downward-closed in p and upward-closed in t.
event = ProductEvent(4, lambda p, t: is_leq_strong(p, t).leq, "decreasing", "increasing")
print(f"\ncomparability event on S_4 x S_4: P = {event.probability}")
self_check = fkg_product_check(event, event)
print(f"P(A and A) = {self_check.lhs} >= P(A)^2 = {self_check.rhs}: {self_check.holds}")

print("\nsame sweep via the CLI: bruhatmc fkg --n 5 --pairs 200 --seed 3")
