import random
from fractions import Fraction as F

import pytest
from hypothesis import given
import hypothesis.strategies as st

from cantornet.recursive import build_recursive_net, build_recursive_net_1d
from cantornet.relu_core import activation_pattern
from cantornet.triadic import (
    ActivationCode,
    IntervalIndex,
    activation_code,
    code_to_pattern,
    interval_index,
    pattern_fast,
    triadic_digits,
    walk_step_count,
)

from conftest import unit_points, unit_rationals


def literal_walk(x1, k):
    """Direct transcription of the interval walk with its termination flag."""
    f1 = lambda x: 1 - 3 * x
    f2 = lambda x: 3 * x - 2
    pi = []
    j = 0
    termination = False
    while not termination:
        j += 1
        if j == k:
            termination = True
        if 0 <= x1 <= F(1, 3):
            x1 = f1(x1)
            pi.append(0)
        elif F(1, 3) < x1 < F(2, 3):
            termination = True
        else:
            x1 = f2(x1)
            pi.append(1)
    return tuple(pi)


@pytest.mark.parametrize(
    "x, l, digits, flag",
    [
        (F(1, 3), 3, (0, 2, 2), True),
        (F(1, 2), 4, (1, 1, 1, 1), False),
        (F(2, 9), 2, (0, 2), True),
        (F(1), 3, (2, 2, 2), True),
        (F(0), 3, (0, 0, 0), True),
        (F(4, 9), 3, (1, 0, 2), False),
    ],
)
def test_triadic_digits(x, l, digits, flag):
    t = triadic_digits(x, l)
    assert t.digits == digits
    assert t.cantor_flag is flag


@given(st.integers(1, 8).flatmap(lambda l: st.tuples(st.just(l), st.integers(0, 3**l))))
def test_digits_round_trip(args):
    l, i = args
    x = F(i, 3**l)
    t = triadic_digits(x, l)
    assert t.value() == x
    assert 0 <= t.tail <= 1


@given(unit_rationals, st.integers(1, 10))
def test_digits_value_is_exact(x, l):
    assert triadic_digits(x, l).value() == x


@given(unit_rationals, st.integers(1, 12))
def test_code_matches_literal_walk(x, k):
    assert activation_code(x, k).bits == literal_walk(x, k)


def test_code_examples():
    # 1/6 -> left, then f1(1/6) = 1/2 is in the open middle
    c = activation_code(F(1, 6), 3)
    assert c == ActivationCode((0,), True, None)
    assert activation_code(F(1, 2), 5) == ActivationCode((), True, None)
    # 0 -> 1 -> 1 -> ...
    assert activation_code(0, 4).bits == (0, 1, 1, 1)
    assert activation_code(F(1, 3), 2) == ActivationCode((0, 0), False, 1)


def test_interval_index_examples():
    assert interval_index(F(1, 18), 3).indices[0] == 1
    assert interval_index(F(1, 2), 4).indices == (2,)
    assert interval_index(F(7, 9), 2).indices == (3, 1)
    with pytest.raises(ValueError):
        IntervalIndex((2, 1))


@given(unit_rationals, st.integers(1, 12))
def test_walk_is_linear_in_k(x, k):
    assert walk_step_count(x, k) <= k
    assert len(activation_code(x, k).bits) <= k


@pytest.mark.parametrize(
    "code, k, expected",
    [
        (ActivationCode((0,), False), 1, "10111"),
        (ActivationCode((0, 0), False), 2, "1011110111"),
        (ActivationCode((), True), 1, "00101"),
        (ActivationCode((1,), False), 1, "01111"),
        # middle at step 2, then the fixed 0 -> 1 -> 1 trajectory
        (ActivationCode((0,), True), 4, "10111" "00101" "10111" "01111"),
    ],
)
def test_code_to_pattern(code, k, expected):
    assert str(code_to_pattern(code, k)) == expected


def test_code_to_pattern_rejects_long_codes():
    with pytest.raises(ValueError):
        code_to_pattern(ActivationCode((0, 1, 1), False), 2)


def test_repeated_left_block_subinterval_pattern():
    # walk address (1, 1): x in I_1 and 1 - 3x in I_1, i.e. x in [2/9, 1/3]
    net = build_recursive_net(2)
    assert activation_pattern(net, (F(5, 18), F(1, 10))).blocks(5) == ["10111", "10111"]
    # the geometrically leftmost ninth has walk address (1, 3)
    assert interval_index(F(1, 18), 2).indices == (1, 3)
    assert activation_pattern(net, (F(1, 18), F(1, 10))).blocks(5) == ["10111", "01111"]


@given(unit_rationals, st.fractions(min_value=0, max_value=1, max_denominator=97), st.integers(1, 8))
def test_isomorphism(x, y, k):
    code = activation_code(x, k)
    expected = activation_pattern(build_recursive_net(k), (x, y))
    assert code_to_pattern(code, k, y_positive=y > 0) == expected


@given(unit_points, st.integers(1, 8))
def test_pattern_fast_agrees(point, k):
    pattern, steps = pattern_fast(point, k, return_steps=True)
    assert pattern == activation_pattern(build_recursive_net(k), point)
    assert steps == k


def test_pattern_fast_examples():
    assert str(pattern_fast((F(1, 6), F(1, 10)), 1)) == "10111"
    bits = pattern_fast((F(2, 7), 0), 4).bits
    assert all(bits[5 * b + 2] == 0 and bits[5 * b + 4] == 0 for b in range(4))


def test_one_dimensional_net_matches_x_bits():
    rng = random.Random(3)
    for _ in range(200):
        k = rng.randint(1, 6)
        x = F(rng.randint(0, 3**k * 7), 3**k * 7)
        full = pattern_fast((x, F(1, 2)), k).bits
        x_bits = tuple(b for i, b in enumerate(full) if i % 5 in (0, 1, 3))
        assert activation_pattern(build_recursive_net_1d(k), [x]).bits == x_bits


def test_middle_absorption():
    # after the walk enters the middle, the remaining blocks do not depend on x
    for k in range(2, 7):
        a = pattern_fast((F(4, 9), F(1, 2)), k)
        b = pattern_fast((F(5, 9), F(1, 2)), k)
        assert a == b
