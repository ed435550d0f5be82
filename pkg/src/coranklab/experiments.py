"""Exact enumeration, Monte Carlo estimation and bound comparison for
corank probabilities of random 0/1 matrices.

Exact enumeration weights every matrix by p^(#ones) (1-p)^(#zeros) in
rational arithmetic; it walks row multisets instead of raw matrices
(rank and the number of ones are invariant under row order, so each
multiset is counted with its multinomial multiplicity) and memoizes
ranks per column-sorted canonical form.  Monte Carlo corank decisions
use the one-sided modular screen confirmed by rational elimination, so
no floating point and no false decisions enter the counts.  Rare events
are never importance-sampled: zero hits are reported as "below MC
resolution" with the rule-of-three bound 3/trials.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import ceil, comb, factorial, sqrt
from typing import Optional, Sequence, Union

import numpy as np

from .anticoncentration import _check_orthonormal_rows
from .errors import InputError, InvariantViolation, ResourceRefusal
from .matrix import (
    Probability,
    SCREEN_PRIME,
    _check_p,
    bareiss_rank,
    corank_at_least,
    modular_rank,
)
from .rng import GENERATOR_VERSION, bernoulli_bits, generator

ENUMERATION_LIMIT = 5  # 2^(n^2) matrices; n = 5 is 2^25
MC_CHUNK = 4096  # chunk size is part of the reproducible stream layout
WILSON_Z = 1.96


@dataclass(frozen=True)
class CorankDistribution:
    n: int
    p: Fraction
    probs: dict  # corank -> exact Fraction, zero coranks omitted
    method: str
    matrix_count: int

    def prob_at_least(self, k: int) -> Fraction:
        return sum((q for c, q in self.probs.items() if c >= k), Fraction(0))


@dataclass(frozen=True)
class EstimateRecord:
    n: int
    k: int
    p: Probability
    trials: int
    hits: int
    estimate: float
    ci_low: float
    ci_high: float
    seed: int
    generator_version: str = GENERATOR_VERSION
    rule_of_three: Optional[float] = None  # set when hits == 0


@dataclass(frozen=True)
class BoundRow:
    n: int
    k: int
    p: Probability
    epsilon: Union[Fraction, float]
    theorem_rate: Union[Fraction, float]  # (1-p+eps)^(kn)
    zero_rows_lower: Union[Fraction, float]  # (1-p)^(kn)
    conjecture_rhs: Union[Fraction, float]
    structured_lower: Union[Fraction, float]
    union_lower: Optional[Fraction] = None  # Bonferroni bound, n <= 5 only


def wilson_interval(hits: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    if trials < 1:
        raise InputError("trials must be at least 1")
    phat = hits / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials)) / denom
    # the interval contains the point estimate; keep that true under rounding
    return min(max(0.0, center - half), phat), max(min(1.0, center + half), phat)


def _decode_rows(combo: Sequence[int], n: int) -> list[list[int]]:
    return [[(b >> j) & 1 for j in range(n)] for b in combo]


def _column_canonical(combo: Sequence[int], n: int) -> tuple:
    # rank is invariant under column permutation; sorting column masks
    # collapses the orbit so Bareiss runs once per class
    cols = []
    for j in range(n):
        mask = 0
        for i, b in enumerate(combo):
            mask |= ((b >> j) & 1) << i
        cols.append(mask)
    return tuple(sorted(cols))


def enumerate_corank(n: int, p: Probability) -> CorankDistribution:
    """Exact corank distribution of the n x n Ber(p) matrix, n <= 5."""
    if not isinstance(p, Fraction):
        raise InputError("exact enumeration needs p as a Fraction (e.g. 1/2)")
    p = _check_p(p)
    if n < 1:
        raise InputError("n must be at least 1")
    if n > ENUMERATION_LIMIT:
        raise ResourceRefusal(
            f"full enumeration of 2^{n * n} matrices refused (n > {ENUMERATION_LIMIT}); use mc_corank"
        )
    cells = n * n
    counts = [[0] * (cells + 1) for _ in range(n + 1)]
    fact = factorial(n)
    rank_memo: dict = {}
    for combo in combinations_with_replacement(range(1 << n), n):
        key = _column_canonical(combo, n)
        r = rank_memo.get(key)
        if r is None:
            r = bareiss_rank(_decode_rows(combo, n))
            rank_memo[key] = r
        ones = sum(bin(b).count("1") for b in combo)
        counts[n - r][ones] += _multinomial_runs(combo, fact)
    q = 1 - p
    weights = [p**w * q ** (cells - w) for w in range(cells + 1)]
    probs = {}
    for c in range(n + 1):
        mass = sum(cnt * weights[w] for w, cnt in enumerate(counts[c]) if cnt)
        if mass:
            probs[c] = mass
    if sum(probs.values()) != 1:
        raise InvariantViolation("corank probabilities do not sum to 1")
    return CorankDistribution(n, p, probs, "full-enumeration", 1 << cells)


def _multinomial_runs(combo: Sequence[int], fact: int) -> int:
    """Permutation count of a sorted multiset: n! / prod(multiplicity!)."""
    mult = fact
    run = 1
    for a, b in zip(combo, combo[1:]):
        run = run + 1 if a == b else 1
        if run > 1:
            mult //= run
    return mult


def mc_corank(
    n: int,
    p: Probability,
    k: int,
    trials: int,
    seed: int,
    chunk_size: int = MC_CHUNK,
) -> EstimateRecord:
    """Monte Carlo estimate of P[corank >= k] with a Wilson 95% interval.

    Fully determined by (n, p, k, trials, seed): trial t lives in chunk
    t // chunk_size, whose bit stream comes from the spawn key
    (seed, chunk index).  Hit counting is associative, so any worker
    layout over chunks yields the same record.
    """
    p = _check_p(p)
    if n < 1 or k < 0:
        raise InputError("need n >= 1 and k >= 0")
    if trials < 1:
        raise InputError("trials must be at least 1")
    pf = float(p)
    hits = 0
    small = n <= 8
    powers = (
        np.left_shift(np.uint64(1), np.arange(n * n, dtype=np.uint64)) if small else None
    )
    memo: dict = {}
    for ci in range(ceil(trials / chunk_size)):
        take = min(chunk_size, trials - ci * chunk_size)
        bits = bernoulli_bits(generator(seed, ci), (chunk_size, n, n), pf)[:take]
        if small:
            codes = (bits.reshape(take, n * n).astype(np.uint64) * powers).sum(axis=1)
            uniq, cnt = np.unique(codes, return_counts=True)
            for code, c in zip(uniq.tolist(), cnt.tolist()):
                hit = memo.get(code)
                if hit is None:
                    rows = [[(code >> (i * n + j)) & 1 for j in range(n)] for i in range(n)]
                    hit = corank_at_least(rows, k)
                    memo[code] = hit
                if hit:
                    hits += c
        else:
            for mat in bits:
                if modular_rank(mat, SCREEN_PRIME) > n - k:
                    continue
                if bareiss_rank(mat.tolist()) <= n - k:
                    hits += 1
    lo, hi = wilson_interval(hits, trials)
    return EstimateRecord(
        n, k, p, trials, hits, hits / trials, lo, hi, int(seed),
        rule_of_three=(3.0 / trials if hits == 0 else None),
    )


def bound_row(n: int, k: int, p: Probability, epsilon) -> BoundRow:
    """Closed-form comparison columns for one (n, k, p, epsilon) cell.

    structured_lower takes, over 0 <= t <= k, the probability that some
    specific k-t+1 rows agree and t further rows vanish, times the
    number of such row choices; the degenerate t = k case is the plain
    k-zero-rows event (a single-row "agreement" constrains nothing).
    Row and column variants coincide by transpose symmetry, so the row
    value is reported.
    """
    p = _check_p(p)
    exact = isinstance(p, Fraction) and isinstance(epsilon, (Fraction, int))
    if exact:
        eps = Fraction(epsilon)
        q = 1 - p
        one = Fraction(1)
    else:
        eps = float(epsilon)
        p = float(p)
        q = 1.0 - p
        one = 1.0
    if eps < 0:
        raise InputError("epsilon must be nonnegative")
    theorem_rate = (one - p + eps) ** (k * n)
    zero_rows = q ** (k * n)
    conjecture = (q + eps) ** (k * n) + (p ** (k + 1) + q ** (k + 1) + eps) ** n
    structured = None
    for t in range(k + 1):
        g = k - t + 1
        if g + t > n:
            continue
        count = comb(n, t) if g == 1 else comb(n, g) * comb(n - g, t)
        term = count * (p**g + q**g) ** n * q ** (t * n)
        structured = term if structured is None else max(structured, term)
    if structured is None:
        structured = Fraction(0) if exact else 0.0
    union = structured_union_lower(n, p, k) if exact and n <= ENUMERATION_LIMIT else None
    return BoundRow(n, k, p, eps, theorem_rate, zero_rows, conjecture, structured, union)


def bound_table(
    n_values: Sequence[int], p: Probability, k: int, epsilon
) -> list[BoundRow]:
    return [bound_row(int(n), k, p, epsilon) for n in n_values]


def _structured_events(n: int, k: int):
    """(equal-row set, zero-row set, axis) triples witnessing corank >= k."""
    events = []
    for axis in ("rows", "cols"):
        for t in range(k + 1):
            g = k - t + 1
            if g + t > n:
                continue
            if g == 1:
                for z in combinations(range(n), t):
                    events.append(((), z, axis))
            else:
                for gset in combinations(range(n), g):
                    rest = [i for i in range(n) if i not in gset]
                    for z in combinations(rest, t):
                        events.append((gset, z, axis))
    return events


def _intersection_probability(events, n: int, p: Fraction) -> Fraction:
    """Exact probability that all the given structured events hold.

    Constraints merge entries of the n x n grid into forced-equal
    classes, some forced zero; classes are independent, each
    contributing p^s + q^s (free, size s) or q^s (zeroed).
    """
    parent = list(range(n * n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    zero_marks = []
    for gset, zset, axis in events:
        def cell(i, j):
            return i * n + j if axis == "rows" else j * n + i
        if gset:
            base = gset[0]
            for i in gset[1:]:
                for c in range(n):
                    union(cell(base, c), cell(i, c))
        for z in zset:
            for c in range(n):
                zero_marks.append(cell(z, c))
    sizes: dict = {}
    zeroed: set = set()
    for e in range(n * n):
        r = find(e)
        sizes[r] = sizes.get(r, 0) + 1
    for e in zero_marks:
        zeroed.add(find(e))
    q = 1 - p
    prob = Fraction(1)
    for root, s in sizes.items():
        prob *= q**s if root in zeroed else p**s + q**s
    return prob


def structured_union_lower(n: int, p: Fraction, k: int) -> Fraction:
    """Second-order Bonferroni lower bound on the probability of the
    union of all structured (equal rows/columns, zero rows/columns)
    events, each of which forces corank >= k.  Exact in rationals."""
    if not isinstance(p, Fraction):
        raise InputError("union lower bound is exact-only; pass p as a Fraction")
    events = _structured_events(n, k)
    if not events:
        return Fraction(0)
    singles = [_intersection_probability([e], n, p) for e in events]
    total = sum(singles, Fraction(0))
    for a in range(len(events)):
        for b in range(a + 1, len(events)):
            total -= _intersection_probability([events[a], events[b]], n, p)
    return max(total, max(singles))


def fixed_vector_event_mc(
    v_columns: np.ndarray,
    p: Probability,
    c: float,
    trials: int,
    seed: int,
    chunk_size: int = MC_CHUNK,
) -> EstimateRecord:
    """Monte Carlo probability of ||M V||_HS <= c sqrt(n) for the
    (n-k) x n Ber(p) matrix M and a fixed orthonormal-column V (n x k)."""
    v = np.atleast_2d(np.asarray(v_columns, dtype=float))
    if v.ndim != 2:
        raise InputError("V must be an n x k matrix")
    n, k = v.shape
    _check_orthonormal_rows(v.T)
    if n - k < 1:
        raise InputError("need n > k so the matrix has at least one row")
    p = _check_p(p)
    c = float(c)
    if c < 0:
        raise InputError("c must be nonnegative")
    if trials < 1:
        raise InputError("trials must be at least 1")
    pf = float(p)
    cap = c * c * n
    hits = 0
    for ci in range(ceil(trials / chunk_size)):
        take = min(chunk_size, trials - ci * chunk_size)
        bits = bernoulli_bits(generator(seed, ci), (chunk_size, n - k, n), pf)[:take]
        prod = bits.astype(float) @ v  # (take, n-k, k)
        hs_sq = np.sum(prod * prod, axis=(1, 2))
        hits += int(np.count_nonzero(hs_sq <= cap))
    lo, hi = wilson_interval(hits, trials)
    return EstimateRecord(
        n, k, p, trials, hits, hits / trials, lo, hi, int(seed),
        rule_of_three=(3.0 / trials if hits == 0 else None),
    )


__all__ = [
    "ENUMERATION_LIMIT",
    "MC_CHUNK",
    "WILSON_Z",
    "BoundRow",
    "CorankDistribution",
    "EstimateRecord",
    "bound_row",
    "bound_table",
    "enumerate_corank",
    "fixed_vector_event_mc",
    "mc_corank",
    "structured_union_lower",
    "wilson_interval",
]
