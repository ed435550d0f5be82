import math
from fractions import Fraction

import numpy as np
import pytest

from coranklab import anticoncentration as ac
from coranklab import errors
from coranklab.rng import generator

from oracles import levy_window_oracle, threshold_grid_oracle

HALF = Fraction(1, 2)


def test_build_distribution_examples():
    d = ac.build_distribution([1, 1], HALF)
    assert d.values.tolist() == [0.0, 1.0, 2.0]
    assert d.probs == (Fraction(1, 4), HALF, Fraction(1, 4))

    d = ac.build_distribution([1, 2], HALF)
    assert d.values.tolist() == [0.0, 1.0, 2.0, 3.0]
    assert d.probs == (Fraction(1, 4),) * 4

    d = ac.build_distribution([], 0.3)
    assert d.values.tolist() == [0.0] and float(d.probs[0]) == 1.0


def test_distribution_mass_exact_and_float():
    rng = generator(3)
    x = rng.normal(size=10)
    exact = ac.build_distribution(x, Fraction(1, 3))
    assert sum(exact.probs) == 1
    approx = ac.build_distribution(x, 1.0 / 3.0)
    assert abs(float(np.sum(approx.probs)) - 1.0) < 1e-12
    assert np.allclose(exact.values, approx.values)
    assert np.allclose(exact.prob_floats(), approx.probs, atol=1e-12)


def test_cap_refused():
    with pytest.raises(errors.ResourceRefusal):
        ac.build_distribution([1.0] * 25, HALF)
    with pytest.raises(errors.ResourceRefusal):
        ac.build_distribution([1.0] * 7, HALF, cap=6)


def test_scalar_levy_examples():
    d = ac.build_distribution([1, 1], HALF)
    assert ac.scalar_levy(d, 0.5) == Fraction(3, 4)
    assert ac.scalar_levy(d, 0.4) == HALF
    assert ac.scalar_levy(d, 1.0) == 1
    assert ac.scalar_levy(d, 0.0) == HALF  # the central atom
    with pytest.raises(errors.InputError):
        ac.scalar_levy(d, -0.1)


def test_scalar_levy_monotone_and_extremes():
    rng = generator(17)
    for _ in range(40):
        n = int(rng.integers(1, 9))
        x = rng.normal(size=n)
        d = ac.build_distribution(x, HALF)
        span = float(d.values[-1] - d.values[0])
        probs = [float(q) for q in d.probs]
        assert ac.scalar_levy(d, 0.0) == max(d.probs)
        assert float(ac.scalar_levy(d, span / 2 + 1e-9)) == 1.0
        rs = sorted(rng.uniform(0, span, size=5))
        vals = [float(ac.scalar_levy(d, r)) for r in rs]
        assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))
        assert abs(sum(probs) - 1.0) < 1e-12


def test_sliding_window_equals_all_pairs_oracle():
    rng = generator(23)
    for trial in range(120):
        if trial % 2:
            n = int(rng.integers(1, 13))
            x = rng.integers(-5, 6, size=n).tolist()
        else:
            n = int(rng.integers(1, 9))
            x = rng.normal(size=n).tolist()
        d = ac.build_distribution(x, Fraction(1, int(rng.integers(2, 5))))
        span = float(d.values[-1] - d.values[0]) if len(d.values) > 1 else 1.0
        r = float(rng.uniform(0, 0.6 * span + 0.01))
        assert ac.scalar_levy(d, r) == levy_window_oracle(d.values, d.probs, r)


def test_vector_bracket_k1_matches_scalar():
    m = np.array([[1.0, 0.0, 0.0, 0.0]])
    lower, upper = ac.vector_levy_bracket(m, HALF, 0.01)
    assert lower == HALF and upper == HALF

    rng = generator(31)
    for _ in range(15):
        n = int(rng.integers(2, 9))
        row = rng.normal(size=n)
        row /= np.linalg.norm(row)
        d = ac.build_distribution(row, HALF)
        r = float(rng.uniform(0, 1))
        lower, upper = ac.vector_levy_bracket(row[None, :], HALF, r)
        assert lower == ac.scalar_levy(d, r)
        assert upper == ac.scalar_levy(d, 2 * r)
        assert lower <= upper


def test_vector_bracket_r0_is_max_atom_mass():
    rng = generator(37)
    q, _ = np.linalg.qr(rng.normal(size=(6, 2)))
    m = q.T
    d = ac.build_vector_distribution(m, HALF)
    lower, upper = ac.vector_levy_bracket(m, HALF, 0.0)
    assert lower == upper == max(d.probs)


def test_vector_bracket_orders_and_validation():
    rng = generator(41)
    for _ in range(10):
        n = int(rng.integers(3, 9))
        q, _ = np.linalg.qr(rng.normal(size=(n, 2)))
        m = q.T
        r = float(rng.uniform(0, 0.5))
        lower, upper = ac.vector_levy_bracket(m, HALF, r)
        assert lower <= upper <= 1
    with pytest.raises(errors.InputError):
        ac.vector_levy_bracket(np.array([[1.0, 1.0]]), HALF, 0.1)


def test_threshold_hand_values():
    assert ac.threshold([1], HALF, 4) == 0.125
    assert ac.threshold([1], HALF, 1) == 1.0
    with pytest.raises(errors.InputError):
        ac.threshold([1], HALF, 0.5)


def test_threshold_monotone_in_L():
    rng = generator(43)
    for _ in range(25):
        n = int(rng.integers(1, 9))
        x = rng.normal(size=n)
        l1, l2 = sorted(rng.uniform(1, 30, size=2))
        assert ac.threshold(x, HALF, l1) >= ac.threshold(x, HALF, l2)


def test_threshold_matches_grid_oracle():
    rng = generator(47)
    step = 1e-6
    for trial in range(30):
        n = int(rng.integers(1, 11))
        x = rng.integers(-3, 4, size=n)
        if not x.any():
            x[0] = 1
        p = Fraction(1, int(rng.integers(2, 5)))
        L = float(rng.integers(4, 40))
        d = ac.build_distribution(x, p)
        got = ac.threshold(x, p, L)
        oracle = threshold_grid_oracle(d.values, d.prob_floats(), L, step)
        assert abs(got - oracle) <= step + 1e-12


def test_lkr_examples():
    chk = ac.lkr_bound_check([1, 1, 1, 1], HALF, [0.4] * 4, 0.4, 2.0)
    assert chk.lhs == Fraction(3, 8)
    assert math.isclose(chk.rhs, 2 * 0.4 / math.sqrt(0.32))
    assert chk.ok

    # radii wide enough that every summand concentrates fully
    chk = ac.lkr_bound_check([1, 1], HALF, [0.6, 0.6], 0.6, 2.0)
    assert chk.rhs == math.inf and chk.ok and chk.observed_constant is None

    chk = ac.lkr_bound_check([1], HALF, [0.4], 0.4, 2.0)
    assert chk.lhs == HALF
    assert math.isclose(chk.rhs, 2 * 0.4 / math.sqrt(0.08))
    assert chk.ok


def test_lkr_validation():
    with pytest.raises(errors.InputError):
        ac.lkr_bound_check([1, 1], HALF, [0.5, 0.5], 0.4, 2.0)  # r < max r_i
    with pytest.raises(errors.InputError):
        ac.lkr_bound_check([0.0, 1.0], HALF, [0.1, 0.1], 0.2, 2.0)  # zero weight
    with pytest.raises(errors.InputError):
        ac.lkr_bound_check([1.0], HALF, [0.0], 0.1, 2.0)  # nonpositive radius
