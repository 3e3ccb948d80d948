"""Comparability tests for the strong and weak Bruhat orders.

The strong order is decided by the prefix-count criterion: p <= t iff every
top-left prefix count of t's permutation matrix is dominated by the matching
prefix count of p's matrix.  The scan below walks rows top to bottom keeping
the running prefix difference, so a violated coordinate near the top-left
(the typical case for an incomparable random pair) aborts after O(n) work.

The cover-graph machinery is an exhaustive oracle for small n, not the
production path.
"""
from __future__ import annotations

import dataclasses
import itertools
from fractions import Fraction
from math import factorial

from .perms import Permutation

# reachability_leq is an oracle; the cover graph blows up combinatorially
REACHABILITY_CAP = 8
# exhaustive pair enumeration: 7 means 5040^2 pairs, gated behind an override
EXACT_COUNT_CAP = 6
EXACT_COUNT_HARD_CAP = 7
CLOSURE_COUNT_CAP = 6


@dataclasses.dataclass(frozen=True)
class ComparabilityVerdict:
    """Outcome of a strong-order comparison.

    ``witness`` is the first coordinate pair (a, b), in row-major scan order,
    where the prefix-count criterion fails; it is present exactly when
    ``leq`` is false.
    """

    leq: bool
    witness: tuple[int, int] | None = None

    def __post_init__(self):
        if self.leq == (self.witness is not None):
            raise ValueError("witness must be present iff leq is false")


@dataclasses.dataclass(frozen=True)
class ExactCount:
    """Exhaustive count of ordered comparable pairs (p, t) with p <= t."""

    n: int
    comparable_pairs: int
    total_pairs: int

    @property
    def probability(self) -> Fraction:
        return Fraction(self.comparable_pairs, self.total_pairs)


def _leq_scan(p: tuple[int, ...], t: tuple[int, ...], n: int) -> tuple[int, int] | None:
    """Return the first (a, b) in row-major order where the prefix difference
    X_p(a,b) - X_t(a,b) goes negative, or None if p <= t.

    Row a changes the difference only on the value range between p(a) and
    t(a), so each row costs |p(a) - t(a)| updates and new violations can only
    appear where the row decrements.
    """
    z = [0] * (n + 1)
    for a0 in range(n):
        pa = p[a0]
        ta = t[a0]
        if pa < ta:
            for b in range(pa, ta):
                z[b] += 1
        elif ta < pa:
            for b in range(ta, pa):
                zb = z[b] - 1
                z[b] = zb
                if zb < 0:
                    return (a0 + 1, b)
    return None


def is_leq_strong(p: Permutation, t: Permutation) -> ComparabilityVerdict:
    """Decide p <= t in the strong Bruhat order in O(n^2) worst case.

    >>> is_leq_strong(Permutation.identity(3), Permutation((3, 1, 2))).leq
    True
    >>> is_leq_strong(Permutation((2, 1, 3)), Permutation((1, 3, 2)))
    ComparabilityVerdict(leq=False, witness=(1, 1))
    """
    if p.n != t.n:
        raise ValueError(f"size mismatch: {p.n} vs {t.n}")
    witness = _leq_scan(p.values, t.values, p.n)
    return ComparabilityVerdict(leq=witness is None, witness=witness)


def _value_inversions(w: tuple[int, ...]) -> set[tuple[int, int]]:
    """Pairs of values (u, v), u < v, whose positions in w are out of order."""
    n = len(w)
    pos = [0] * (n + 1)
    for i, v in enumerate(w):
        pos[v] = i
    return {(u, v) for u in range(1, n) for v in range(u + 1, n + 1) if pos[u] > pos[v]}


def is_leq_weak(p: Permutation, t: Permutation) -> bool:
    """Decide p <= t in the (right) weak order: containment of the sets of
    value pairs placed out of order.

    >>> is_leq_weak(Permutation((2, 1, 3)), Permutation((2, 3, 1)))
    True
    """
    if p.n != t.n:
        raise ValueError(f"size mismatch: {p.n} vs {t.n}")
    return _value_inversions(p.values) <= _value_inversions(t.values)


def covering_successors(p: Permutation) -> list[Permutation]:
    """All q covering p in the strong order.

    Covers are transpositions of positions i < j with p(i) < p(j) and no
    intermediate position holding a value strictly between the two; exactly
    these swaps raise the inversion count by 1.

    >>> [q.values for q in covering_successors(Permutation.identity(3))]
    [(2, 1, 3), (1, 3, 2)]
    """
    w = p.values
    n = p.n
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            lo, hi = w[i], w[j]
            if lo >= hi:
                continue
            if any(lo < w[k] < hi for k in range(i + 1, j)):
                continue
            q = list(w)
            q[i], q[j] = q[j], q[i]
            out.append(Permutation(tuple(q)))
    return out


def all_perms(n: int) -> list[Permutation]:
    """S_n in lexicographic one-line order; the fixed enumeration that
    bitset-indexed event code relies on."""
    return [Permutation(w) for w in itertools.permutations(range(1, n + 1))]


_closure_cache: dict[int, dict[tuple[int, ...], int]] = {}


def _closure_masks(n: int) -> dict[tuple[int, ...], int]:
    """For each p, the bitmask (over lexicographic indices) of all t >= p in
    the cover-graph closure.  Built once per n."""
    if n in _closure_cache:
        return _closure_cache[n]
    perms = list(itertools.permutations(range(1, n + 1)))
    index = {w: i for i, w in enumerate(perms)}
    masks: dict[tuple[int, ...], int] = {}
    # process by descending inversion count so covers are already resolved
    def inv(w):
        return sum(1 for i in range(n) for j in range(i + 1, n) if w[i] > w[j])

    for w in sorted(perms, key=inv, reverse=True):
        mask = 1 << index[w]
        for q in covering_successors(Permutation(w)):
            mask |= masks[q.values]
        masks[w] = mask
    _closure_cache[n] = masks
    return masks


def reachability_leq(p: Permutation, t: Permutation) -> bool:
    """Oracle: is t reachable from p in the directed cover graph?

    Memoized full closure for n <= 6; plain breadth-first search above that,
    up to the hard cap of n = 8.
    """
    if p.n != t.n:
        raise ValueError(f"size mismatch: {p.n} vs {t.n}")
    n = p.n
    if n > REACHABILITY_CAP:
        raise ValueError(f"n={n} above the reachability oracle cap {REACHABILITY_CAP}")
    if n <= CLOSURE_COUNT_CAP:
        masks = _closure_masks(n)
        perms = list(itertools.permutations(range(1, n + 1)))
        index = {w: i for i, w in enumerate(perms)}
        return bool(masks[p.values] >> index[t.values] & 1)
    if p.values == t.values:
        return True
    frontier = [p.values]
    seen = {p.values}
    while frontier:
        nxt = []
        for w in frontier:
            for q in covering_successors(Permutation(w)):
                if q.values == t.values:
                    return True
                if q.values not in seen:
                    seen.add(q.values)
                    nxt.append(q.values)
        frontier = nxt
    return False


def exact_comparability_count(n: int, allow_large: bool = False) -> ExactCount:
    """Count ordered pairs (p, t) with p <= t by enumerating S_n x S_n with
    the prefix-count scan.

    n = 7 costs 5040^2 scans and must be requested with ``allow_large``.

    >>> exact_comparability_count(3).comparable_pairs
    19
    """
    cap = EXACT_COUNT_HARD_CAP if allow_large else EXACT_COUNT_CAP
    if not 1 <= n <= cap:
        raise ValueError(
            f"n={n} above the enumeration cap {cap}"
            + ("" if allow_large else " (pass allow_large=True for n=7)")
        )
    perms = list(itertools.permutations(range(1, n + 1)))
    count = 0
    for p in perms:
        for t in perms:
            if _leq_scan(p, t, n) is None:
                count += 1
    return ExactCount(n, count, factorial(n) ** 2)


def comparability_count_via_covers(n: int) -> ExactCount:
    """Independent count of comparable pairs from the cover-graph closure."""
    if not 1 <= n <= CLOSURE_COUNT_CAP:
        raise ValueError(f"n={n} above the closure cap {CLOSURE_COUNT_CAP}")
    masks = _closure_masks(n)
    count = sum(m.bit_count() for m in masks.values())
    return ExactCount(n, count, factorial(n) ** 2)
