import random
from fractions import Fraction as F

import pytest
from hypothesis import given
import hypothesis.strategies as st

from cantornet.dnf import build_dnf, dnf_value
from cantornet.minmax import (
    build_max_net,
    build_min_net,
    dnf_to_relu,
    expected_rounds,
    verify_ternary_weights,
)
from cantornet.recursive import build_recursive_net
from cantornet.relu_core import forward, layer_count, neuron_count

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=60)


def min_by_identity(x1, x2):
    return x2 - max(x2 - x1, 0)


def test_small_cases():
    assert forward(build_min_net(1), [F(-7, 3)])[0] == (F(-7, 3),)
    assert forward(build_min_net(2), [3, -5])[0] == (-5,)
    assert min_by_identity(3, -5) == -5
    assert forward(build_min_net(3), [F(1, 2)] * 3)[0] == (F(1, 2),)
    assert forward(build_max_net(2), [3, -5])[0] == (3,)
    assert forward(build_max_net(3), [-1, -1, 0])[0] == (0,)


def test_base_blocks_match_hand_construction():
    net = build_min_net(2)
    assert net.layers[0].weights == ((0, 1), (0, -1), (-1, 1))
    assert net.layers[1].weights == ((1, -1, -1),)
    net3 = build_min_net(3)
    assert net3.layers[0].weights == ((0, 1, 0), (0, -1, 0), (-1, 1, 0), (0, 0, 1), (0, 0, -1))
    # A times [[1,-1,-1,0,0],[0,0,0,1,-1]]
    assert net3.layers[1].weights == (
        (0, 0, 0, 1, -1),
        (0, 0, 0, -1, 1),
        (-1, 1, 1, 1, -1),
    )


@given(st.integers(1, 20).flatmap(lambda d: st.lists(rationals, min_size=d, max_size=d)))
def test_min_and_max_exact(v):
    d = len(v)
    assert forward(build_min_net(d), v)[0] == (min(v),)
    assert forward(build_max_net(d), v)[0] == (max(v),)


@given(st.lists(rationals, min_size=2, max_size=12), st.randoms())
def test_permutation_invariance(v, rnd):
    w = list(v)
    rnd.shuffle(w)
    net = build_min_net(len(v))
    assert forward(net, v)[0] == forward(net, w)[0]


def test_max_against_fold_d8():
    rng = random.Random(8)
    net = build_max_net(8)
    for _ in range(200):
        v = [F(rng.randint(-99, 99), rng.randint(1, 9)) for _ in range(8)]
        best = v[0]
        for x in v[1:]:
            best = x if x > best else best
        assert forward(net, v)[0] == (best,)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5, 7, 8, 9, 16, 17, 33, 64])
def test_structure(d):
    for net in (build_min_net(d), build_max_net(d)):
        assert verify_ternary_weights(net)
        assert layer_count(net) - 1 == expected_rounds(d)
    widths = build_min_net(d).hidden_widths
    assert all(b <= a for a, b in zip(widths, widths[1:]))


def test_rejects_empty():
    with pytest.raises(ValueError):
        build_min_net(0)


def test_verify_ternary():
    assert verify_ternary_weights(build_min_net(16))
    assert not verify_ternary_weights(build_recursive_net(1))
    comp = dnf_to_relu(build_dnf(2))
    assert verify_ternary_weights(comp, skip_first=True)
    assert not verify_ternary_weights(comp)


def test_compiled_k1_on_grid():
    expr = build_dnf(1)
    net = dnf_to_relu(expr)
    for i in range(28):
        for j in range(28):
            p = (F(i, 27), F(j, 27))
            out = forward(net, p)[0][0]
            assert out == dnf_value(expr, p)


def test_compiled_counts_grow():
    counts = [neuron_count(dnf_to_relu(build_dnf(k))) for k in range(1, 6)]
    assert counts[2] >= 2**3
    assert counts == sorted(counts)
    assert dnf_to_relu(build_dnf(3)).meta == {"repr": "dnf-compiled", "k": 3}
