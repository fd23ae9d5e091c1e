import re
from fractions import Fraction as F

import pytest
from hypothesis import given
import hypothesis.strategies as st

from cantornet.recursive import build_recursive_net
from cantornet.relu_core import (
    ActivationPattern,
    AffineLayer,
    ForwardTrace,
    NetworkFormatError,
    ReluNetwork,
    activation_pattern,
    affine_gradient,
    binarize,
    deserialize,
    forward,
    identity_net,
    layer_count,
    neuron_count,
    relu,
    serialize,
)

from conftest import unit_points


@pytest.mark.parametrize(
    "v, expected",
    [
        ((F(-1), F(0), F(2)), (0, 0, 2)),
        ((F(0),), (0,)),
        ((F(1, 3), F(-2, 7)), (F(1, 3), 0)),
    ],
)
def test_relu(v, expected):
    assert relu(v) == tuple(F(e) for e in expected)


def test_forward_identity():
    out, trace = forward(identity_net(1), [F(3, 2)])
    assert out == (F(3, 2),)
    assert trace.pre_activations == ()


@pytest.mark.parametrize(
    "point, expected",
    [
        ((F(1, 2), F(3, 4)), F(1, 4)),
        ((F(0), F(1)), F(0)),
        ((F(1, 6), F(9, 10)), F(3, 20)),
    ],
)
def test_forward_k1(point, expected):
    out, _ = forward(build_recursive_net(1), point)
    assert out == (expected,)


def test_forward_rejects_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        forward(build_recursive_net(1), [F(1, 2)])


def test_forward_rejects_floats():
    with pytest.raises(TypeError):
        forward(build_recursive_net(1), [0.5, 0.5])


def test_binarize():
    trace = ForwardTrace(((F(1), F(0), F(-2)), (F(1, 3), F(5))), ())
    assert binarize(trace).bits == (1, 0, 0, 1, 1)
    assert binarize([F(0)] * 4).bits == (0, 0, 0, 0)


@pytest.mark.parametrize(
    "point, bits",
    [
        ((F(1, 6), F(1, 10)), "10111"),
        ((F(1, 2), F(1, 10)), "00101"),
        ((F(5, 6), F(1, 10)), "01111"),
    ],
)
def test_interval_patterns(point, bits):
    assert str(activation_pattern(build_recursive_net(1), point)) == bits


def test_affine_gradient_identity():
    M, c = affine_gradient(identity_net(2), [F(1, 7), F(3)])
    assert M == ((1, 0), (0, 1))
    assert c == (0, 0)


def test_affine_gradient_middle_region():
    M, c = affine_gradient(build_recursive_net(1), (F(1, 2), F(3, 4)))
    assert M == ((F(0), F(1)),)
    assert c == (F(-1, 2),)


@given(unit_points, st.integers(1, 4))
def test_affine_map_reproduces_final_affine_output(point, k):
    net = build_recursive_net(k)
    (M,), (c,) = affine_gradient(net, point)
    _, trace = forward(net, point)
    assert trace.final_affine[0] == M[0] * point[0] + M[1] * point[1] + c


@given(unit_points, unit_points, st.integers(1, 3))
def test_equal_patterns_give_equal_maps(p, q, k):
    net = build_recursive_net(k)
    if activation_pattern(net, p) == activation_pattern(net, q):
        assert affine_gradient(net, p) == affine_gradient(net, q)


@given(unit_points, st.integers(1, 4))
def test_post_clamp_values_nonnegative_and_deterministic(point, k):
    net = build_recursive_net(k)
    _, trace = forward(net, point)
    assert all(max(v, 0) >= 0 for layer in trace.pre_activations for v in relu(layer))
    assert activation_pattern(net, point) == activation_pattern(net, point)


def test_counts():
    assert (neuron_count(build_recursive_net(1)), layer_count(build_recursive_net(1))) == (5, 3)
    assert neuron_count(build_recursive_net(3)) == 15
    assert neuron_count(identity_net(3)) == 0


def test_layer_validation():
    with pytest.raises(ValueError, match="bias length"):
        AffineLayer(((1, 0),), (0, 0))
    with pytest.raises(ValueError, match="expects"):
        ReluNetwork((AffineLayer(((1, 0),), (0,)), AffineLayer(((1, 1),), (0,))))


def test_pattern_string_forms():
    p = ActivationPattern.from_string("10111;10111")
    assert p.blocks(5) == ["10111", "10111"]
    with pytest.raises(ValueError):
        ActivationPattern.from_string("102")


@pytest.mark.parametrize("k", [1, 3])
def test_serialization_round_trip(k):
    net = build_recursive_net(k)
    data = serialize(net)
    again = deserialize(data)
    assert again == net
    assert again.meta == {"repr": "recursive", "k": k}
    assert serialize(again) == data


def test_serialized_format_uses_rational_strings():
    text = serialize(build_recursive_net(1)).decode()
    assert '"-1/2"' in text and '"final_clamp":true' in text


def test_deserialize_accepts_integer_strings_without_denominator():
    net = deserialize('{"final_clamp": false, "layers": [{"weights": [["2", "1/3"]], "biases": ["-5"]}]}')
    assert forward(net, [1, 3])[0] == (F(-2),)


@pytest.mark.parametrize(
    "payload, where",
    [
        ("{", "line 1"),
        ('{"final_clamp": 1, "layers": []}', "final_clamp"),
        ('{"final_clamp": true, "layers": [{"weights": [["a"]], "biases": ["0"]}]}', "layers[0].weights[0][0]"),
        ('{"final_clamp": true, "layers": [{"weights": [["1"]], "biases": [1]}]}', "layers[0].biases[0]"),
        ('{"final_clamp": true, "layers": [{"weights": [["1", "2"]], "biases": ["1", "2"]}]}', "layers[0]"),
    ],
)
def test_deserialize_reports_location(payload, where):
    with pytest.raises(NetworkFormatError, match=re.escape(where)):
        deserialize(payload)
