from fractions import Fraction

import numpy as np
import pytest

from coranklab import errors, experiments as ex
from coranklab.matrix import bareiss_rank
from coranklab.rng import bernoulli_bits, generator

from oracles import corank_distribution_bruteforce

HALF = Fraction(1, 2)


def test_enumerate_small_values():
    d1 = ex.enumerate_corank(1, Fraction(1, 3))
    assert d1.prob_at_least(1) == Fraction(2, 3)
    d2 = ex.enumerate_corank(2, HALF)
    assert d2.prob_at_least(1) == Fraction(10, 16)
    assert d2.prob_at_least(2) == Fraction(1, 16)
    assert d2.matrix_count == 16 and d2.method == "full-enumeration"
    d3 = ex.enumerate_corank(3, HALF)
    assert d3.prob_at_least(1) == Fraction(338, 512)


def test_enumerate_matches_bruteforce_oracle():
    for n, p in ((2, Fraction(1, 4)), (3, Fraction(1, 3)), (3, HALF)):
        got = ex.enumerate_corank(n, p).probs
        want = corank_distribution_bruteforce(n, p)
        want = {c: q for c, q in want.items() if q}
        assert got == want


def test_enumerate_mass_and_monotonicity():
    for p in (HALF, Fraction(1, 4), Fraction(2, 5)):
        d = ex.enumerate_corank(4, p)
        assert sum(d.probs.values()) == 1
        tail = [d.prob_at_least(k) for k in range(0, 6)]
        assert tail[0] == 1
        assert all(a >= b for a, b in zip(tail, tail[1:]))


def test_enumerate_refusals():
    with pytest.raises(errors.ResourceRefusal):
        ex.enumerate_corank(6, HALF)
    with pytest.raises(errors.InputError):
        ex.enumerate_corank(3, 0.5)  # float p has no exact weights


def test_mc_interval_contains_exact():
    exact = float(ex.enumerate_corank(3, HALF).prob_at_least(1))
    rec = ex.mc_corank(3, HALF, 1, 40_000, seed=2027)
    assert rec.ci_low <= exact <= rec.ci_high
    assert rec.ci_low <= rec.estimate <= rec.ci_high
    assert rec.generator_version


def test_mc_determinism_and_impossible_event():
    a = ex.mc_corank(2, HALF, 1, 5_000, seed=55)
    b = ex.mc_corank(2, HALF, 1, 5_000, seed=55)
    assert a == b
    c = ex.mc_corank(2, HALF, 1, 5_000, seed=56)
    assert c != a
    z = ex.mc_corank(2, HALF, 3, 100, seed=1)
    assert z.hits == 0 and z.estimate == 0.0
    assert z.rule_of_three == 3.0 / 100


def test_mc_counts_match_direct_rational_recount():
    # replay the same chunked streams and recount with Bareiss only
    n, k, trials, seed = 3, 1, 3_000, 77
    rec = ex.mc_corank(n, HALF, k, trials, seed, chunk_size=1024)
    hits = 0
    done = 0
    ci = 0
    while done < trials:
        take = min(1024, trials - done)
        bits = bernoulli_bits(generator(seed, ci), (1024, n, n), 0.5)[:take]
        for mat in bits:
            if n - bareiss_rank(mat.tolist()) >= k:
                hits += 1
        done += take
        ci += 1
    assert hits == rec.hits


def test_mc_large_n_path():
    rec = ex.mc_corank(10, HALF, 1, 400, seed=13)
    assert 0 <= rec.hits <= 400
    assert rec.ci_low <= rec.estimate <= rec.ci_high


def test_wilson_interval_basics():
    lo, hi = ex.wilson_interval(0, 100)
    assert lo == 0.0 and 0 < hi < 0.05
    lo, hi = ex.wilson_interval(100, 100)
    assert hi == 1.0 and lo > 0.95
    with pytest.raises(errors.InputError):
        ex.wilson_interval(0, 0)


def test_bound_rows_closed_forms():
    rows = ex.bound_table([2, 3, 4], HALF, 1, Fraction(0))
    for row in rows:
        # p = 1/2: p^2 + q^2 = 1/2, so the conjecture adds two equal terms
        assert row.conjecture_rhs == 2 * HALF**row.n
        assert row.theorem_rate == row.zero_rows_lower == HALF**row.n
    row = ex.bound_row(4, 2, Fraction(3, 10), Fraction(0))
    assert row.zero_rows_lower == Fraction(7, 10) ** 8
    base = Fraction(3, 10) ** 3 + Fraction(7, 10) ** 3
    assert base == Fraction(37, 100)
    assert row.conjecture_rhs == Fraction(7, 10) ** 8 + base**4


def test_bound_rows_epsilon_and_float_path():
    r0 = ex.bound_row(3, 1, HALF, Fraction(0))
    r1 = ex.bound_row(3, 1, HALF, Fraction(1, 10))
    assert r1.theorem_rate > r0.theorem_rate
    assert r0.zero_rows_lower <= r0.theorem_rate
    rf = ex.bound_row(3, 1, 0.5, 0.1)
    assert abs(rf.theorem_rate - float(r1.theorem_rate)) < 1e-12
    with pytest.raises(errors.InputError):
        ex.bound_row(3, 1, HALF, Fraction(-1, 10))


def test_structured_lower_witnesses_are_below_exact():
    for n in (2, 3, 4):
        for k in (1, 2):
            for p in (HALF, Fraction(1, 4), Fraction(1, 3)):
                exact = ex.enumerate_corank(n, p).prob_at_least(k)
                row = ex.bound_row(n, k, p, Fraction(0))
                assert row.union_lower is not None
                assert row.union_lower <= exact
                assert row.zero_rows_lower <= exact


def test_structured_lower_degenerate_cells():
    # n < k + 1 leaves no structured event
    row = ex.bound_row(2, 2, HALF, Fraction(0))
    assert row.structured_lower == 0
    assert row.union_lower == 0


def test_fixed_vector_event_examples():
    v = np.zeros((6, 1))
    v[0, 0] = 1.0
    rec = ex.fixed_vector_event_mc(v, HALF, 10.0, 500, seed=3)
    assert rec.hits == 500 and rec.estimate == 1.0
    # c = 0: the selected column must vanish, probability (1-p)^(n-k)
    rec = ex.fixed_vector_event_mc(v, HALF, 0.0, 40_000, seed=5)
    assert rec.ci_low <= 1 / 32 <= rec.ci_high
    with pytest.raises(errors.InputError):
        ex.fixed_vector_event_mc(np.ones((4, 1)), HALF, 1.0, 10, seed=1)
    with pytest.raises(errors.InputError):
        ex.fixed_vector_event_mc(np.eye(3), HALF, 1.0, 10, seed=1)  # n == k
