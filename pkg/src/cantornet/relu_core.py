"""Exact-arithmetic feedforward ReLU networks.

Every scalar is a :class:`fractions.Fraction`. A network is a list of affine
layers with a clamp-at-zero between consecutive layers and, optionally, after
the last one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]


class NetworkFormatError(ValueError):
    """Raised when a serialized network cannot be parsed."""


def to_fraction(value: Any) -> Fraction:
    """Convert ints, Fractions, or strings like ``"3/4"`` / ``"0.25"`` exactly.

    Floats are rejected: they would silently round boundary values.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} exactly; pass int, Fraction or str")


def format_fraction(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _as_vector(values: Iterable[Any]) -> Vector:
    return tuple(to_fraction(v) for v in values)


@dataclass(frozen=True)
class AffineLayer:
    weights: Matrix
    biases: Vector

    def __post_init__(self):
        weights = tuple(_as_vector(row) for row in self.weights)
        biases = _as_vector(self.biases)
        if len(biases) != len(weights):
            raise ValueError(f"bias length {len(biases)} != weight rows {len(weights)}")
        if weights and len({len(row) for row in weights}) != 1:
            raise ValueError("ragged weight matrix")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)
        # nonzero (column, weight) pairs per row; most constructed layers are sparse
        sparse = tuple(tuple((j, w) for j, w in enumerate(row) if w) for row in weights)
        object.__setattr__(self, "_sparse_rows", sparse)

    @property
    def out_dim(self) -> int:
        return len(self.weights)

    @property
    def in_dim(self) -> int:
        return len(self.weights[0]) if self.weights else 0

    def apply(self, v: Sequence[Fraction]) -> Vector:
        out = []
        for row, b in zip(self._sparse_rows, self.biases):
            acc = b
            for j, w in row:
                acc += w * v[j]
            out.append(acc)
        return tuple(out)


@dataclass(frozen=True)
class ReluNetwork:
    layers: tuple[AffineLayer, ...]
    final_clamp: bool = False
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("a network needs at least one affine layer")
        for i in range(len(layers) - 1):
            if layers[i].out_dim != layers[i + 1].in_dim:
                raise ValueError(
                    f"layer {i} outputs {layers[i].out_dim} values but layer {i + 1} "
                    f"expects {layers[i + 1].in_dim}"
                )
        object.__setattr__(self, "layers", layers)

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def hidden_widths(self) -> tuple[int, ...]:
        return tuple(layer.out_dim for layer in self.layers[:-1])


@dataclass(frozen=True)
class ForwardTrace:
    """Pre-clamp values of every hidden layer plus the network output."""

    pre_activations: tuple[Vector, ...]
    output: Vector
    # final affine output before the optional trailing clamp
    final_affine: Vector = ()


@dataclass(frozen=True)
class ActivationPattern:
    bits: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    def blocks(self, size: int) -> list[str]:
        s = str(self)
        return [s[i : i + size] for i in range(0, len(s), size)]

    @classmethod
    def from_string(cls, s: str) -> "ActivationPattern":
        s = s.replace(";", "").replace(",", "").replace(" ", "")
        if set(s) - {"0", "1"}:
            raise ValueError(f"not a bit string: {s!r}")
        return cls(tuple(int(c) for c in s))


def relu(v: Iterable[Fraction]) -> Vector:
    return tuple(x if x > 0 else ZERO for x in v)


def forward(net: ReluNetwork, point: Sequence[Any]) -> tuple[Vector, ForwardTrace]:
    """Evaluate ``net`` at ``point`` exactly and record hidden pre-activations."""
    x = _as_vector(point)
    if len(x) != net.in_dim:
        raise ValueError(f"input has dimension {len(x)}, network expects {net.in_dim}")
    pre = []
    for layer in net.layers[:-1]:
        z = layer.apply(x)
        pre.append(z)
        x = relu(z)
    final = net.layers[-1].apply(x)
    out = relu(final) if net.final_clamp else final
    return out, ForwardTrace(tuple(pre), out, final)


def binarize(trace: ForwardTrace | Iterable[Fraction]) -> ActivationPattern:
    """Strictly positive entries map to 1, everything else (exact zeros included) to 0."""
    if isinstance(trace, ForwardTrace):
        values = (v for layer in trace.pre_activations for v in layer)
    else:
        values = trace
    return ActivationPattern(tuple(1 if v > 0 else 0 for v in values))


def activation_pattern(net: ReluNetwork, point: Sequence[Any]) -> ActivationPattern:
    return binarize(forward(net, point)[1])


def _masked_affine(net: ReluNetwork, bits: Sequence[int]) -> tuple[Matrix, Vector]:
    n_in = net.in_dim
    # running affine map x -> M x + c, starting from the identity
    M = [[ONE if i == j else ZERO for j in range(n_in)] for i in range(n_in)]
    c = [ZERO] * n_in
    pos = 0
    for idx, layer in enumerate(net.layers):
        newM, newc = [], []
        for row, b in zip(layer.weights, layer.biases):
            mrow = [ZERO] * n_in
            acc = b
            for w, mr, cr in zip(row, M, c):
                if w:
                    acc += w * cr
                    for j in range(n_in):
                        if mr[j]:
                            mrow[j] += w * mr[j]
            newM.append(mrow)
            newc.append(acc)
        if idx < len(net.layers) - 1:
            for r in range(len(newM)):
                if not bits[pos + r]:
                    newM[r] = [ZERO] * n_in
                    newc[r] = ZERO
            pos += len(newM)
        M, c = newM, newc
    return tuple(tuple(r) for r in M), tuple(c)


def affine_gradient(net: ReluNetwork, point: Sequence[Any]) -> tuple[Matrix, Vector]:
    """Exact affine map realized on the linear region containing ``point``.

    The map describes the last affine layer's output, i.e. before any final
    clamp; on the region it satisfies ``trace.final_affine == M @ point + c``.
    """
    return _masked_affine(net, activation_pattern(net, point).bits)


def affine_map_for_pattern(net: ReluNetwork, pattern: ActivationPattern) -> tuple[Matrix, Vector]:
    if len(pattern) != neuron_count(net):
        raise ValueError("pattern length does not match the hidden neuron count")
    return _masked_affine(net, pattern.bits)


def neuron_count(net: ReluNetwork) -> int:
    return sum(net.hidden_widths)


def layer_count(net: ReluNetwork) -> int:
    return len(net.layers)


# --- serialization -----------------------------------------------------------


def network_to_dict(net: ReluNetwork) -> dict:
    return {
        "final_clamp": net.final_clamp,
        "layers": [
            {
                "weights": [[format_fraction(w) for w in row] for row in layer.weights],
                "biases": [format_fraction(b) for b in layer.biases],
            }
            for layer in net.layers
        ],
        "meta": net.meta,
    }


def serialize(net: ReluNetwork) -> bytes:
    return json.dumps(network_to_dict(net), sort_keys=True, separators=(",", ":")).encode("utf-8")


def _parse_rational(s: Any, where: str) -> Fraction:
    if not isinstance(s, str):
        raise NetworkFormatError(f"{where}: expected a rational string, got {type(s).__name__}")
    try:
        return to_fraction(s)
    except ValueError as exc:
        raise NetworkFormatError(f"{where}: {exc}") from None


def network_from_dict(obj: Any) -> ReluNetwork:
    if not isinstance(obj, dict):
        raise NetworkFormatError("top level: expected an object")
    if not isinstance(obj.get("final_clamp"), bool):
        raise NetworkFormatError("final_clamp: expected a boolean")
    raw_layers = obj.get("layers")
    if not isinstance(raw_layers, list) or not raw_layers:
        raise NetworkFormatError("layers: expected a non-empty array")
    layers = []
    for i, raw in enumerate(raw_layers):
        where = f"layers[{i}]"
        if not isinstance(raw, dict):
            raise NetworkFormatError(f"{where}: expected an object")
        W, b = raw.get("weights"), raw.get("biases")
        if not isinstance(W, list) or not all(isinstance(r, list) for r in W):
            raise NetworkFormatError(f"{where}.weights: expected an array of arrays")
        if not isinstance(b, list):
            raise NetworkFormatError(f"{where}.biases: expected an array")
        weights = tuple(
            tuple(_parse_rational(w, f"{where}.weights[{r}][{c}]") for c, w in enumerate(row))
            for r, row in enumerate(W)
        )
        biases = tuple(_parse_rational(v, f"{where}.biases[{r}]") for r, v in enumerate(b))
        try:
            layers.append(AffineLayer(weights, biases))
        except ValueError as exc:
            raise NetworkFormatError(f"{where}: {exc}") from None
    meta = obj.get("meta", {})
    if not isinstance(meta, dict):
        raise NetworkFormatError("meta: expected an object")
    try:
        return ReluNetwork(tuple(layers), obj["final_clamp"], meta)
    except ValueError as exc:
        raise NetworkFormatError(f"layers: {exc}") from None


def deserialize(data: bytes | str) -> ReluNetwork:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise NetworkFormatError(f"byte {exc.start}: invalid UTF-8") from None
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return network_from_dict(obj)


def identity_net(dim: int) -> ReluNetwork:
    W = tuple(tuple(ONE if i == j else ZERO for j in range(dim)) for i in range(dim))
    return ReluNetwork((AffineLayer(W, (ZERO,) * dim),))
