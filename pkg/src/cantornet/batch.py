"""Vectorized exact evaluation over many rational points.

A batch of points sharing one denominator ``D`` is stored as an integer array
of numerators. Each affine layer is rescaled to integer weights over the
lcm of its denominators, so every intermediate value stays an exact integer
numerator over a known common denominator. Layers are held as scipy sparse
matrices; int64 is used when a worst-case magnitude bound allows it and
Python-int object arrays otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .relu_core import AffineLayer, ReluNetwork

_INT64_SAFE = 2**62


@dataclass(frozen=True)
class IntegerLayer:
    weights: sp.csr_matrix | None  # int64 numerators (out, in); None if too large
    weights_obj: tuple  # same entries as Python ints, for the overflow path
    biases: np.ndarray  # object array of Python ints
    scale: int  # common denominator of weights and biases
    row_abs_sum: int
    out_dim: int


@dataclass(frozen=True)
class IntegerNet:
    layers: tuple[IntegerLayer, ...]
    final_clamp: bool

    @property
    def hidden_widths(self):
        return tuple(layer.out_dim for layer in self.layers[:-1])


def compile_layer(layer: AffineLayer) -> IntegerLayer:
    dens = [w.denominator for row in layer.weights for w in row if w]
    dens += [b.denominator for b in layer.biases if b]
    L = lcm(*dens) if dens else 1
    rows, cols, vals = [], [], []
    weights_obj = []
    abs_sums = []
    for i, row in enumerate(layer.weights):
        obj_row = []
        s = 0
        for j, w in enumerate(row):
            if w:
                n = int(w * L)
                rows.append(i)
                cols.append(j)
                vals.append(n)
                obj_row.append((j, n))
                s += abs(n)
        weights_obj.append(tuple(obj_row))
        abs_sums.append(s)
    biases = np.array([int(b * L) for b in layer.biases], dtype=object)
    big = any(abs(v) >= _INT64_SAFE for v in vals) or any(abs(b) >= _INT64_SAFE for b in biases)
    W = None
    if not big:
        W = sp.csr_matrix(
            (np.array(vals, dtype=np.int64), (rows, cols)), shape=(layer.out_dim, layer.in_dim)
        )
    return IntegerLayer(W, tuple(weights_obj), biases, L, max(abs_sums, default=0), layer.out_dim)


def compile_network(net: ReluNetwork) -> IntegerNet:
    return IntegerNet(tuple(compile_layer(l) for l in net.layers), net.final_clamp)


def points_to_integers(points: Sequence[Sequence[Fraction]]) -> tuple[np.ndarray, int]:
    """Return (numerators, common denominator) for a list of rational points."""
    D = lcm(*(Fraction(v).denominator for p in points for v in p)) if points else 1
    arr = np.array([[int(Fraction(v) * D) for v in p] for p in points], dtype=object)
    return _shrink(arr), D


def _shrink(arr: np.ndarray) -> np.ndarray:
    if arr.size == 0:
        return arr.astype(np.int64)
    m = max(abs(int(arr.max())), abs(int(arr.min())))
    if m < _INT64_SAFE:
        return arr.astype(np.int64)
    return arr.astype(object)


def apply_layer(layer: IntegerLayer, X: np.ndarray, D: int) -> tuple[np.ndarray, int]:
    """Affine map on numerators X (n, in) with denominator D; returns (Z, D * scale)."""
    n = X.shape[0]
    xmax = int(np.abs(X).max()) if X.size else 0
    bmax = max((abs(int(b)) for b in layer.biases), default=0)
    bound = layer.row_abs_sum * xmax + bmax * D
    out_dim = layer.out_dim
    if bound < _INT64_SAFE and X.dtype != object and layer.weights is not None:
        Z = np.asarray((layer.weights @ X.T).T, dtype=np.int64)
        if bmax:
            Z = Z + (layer.biases.astype(np.int64) * D)[None, :]
    else:
        Xo = X.astype(object)
        Z = np.empty((n, out_dim), dtype=object)
        for i, row in enumerate(layer.weights_obj):
            col = np.full(n, int(layer.biases[i]) * D, dtype=object)
            for j, w in row:
                col = col + Xo[:, j] * w
            Z[:, i] = col
        Z = _shrink(Z)
    return Z, D * layer.scale


def forward_batch(
    inet: IntegerNet, X: np.ndarray, D: int, *, keep_pre: bool = False, clamp_output: bool = True
):
    """Evaluate on numerators ``X`` with denominator ``D``.

    Returns ``(output, out_den, pre)`` where ``pre`` is a list of
    ``(numerators, denominator)`` per hidden layer when ``keep_pre`` is set.
    Output is the final affine value, clamped if the net has a final clamp
    and ``clamp_output`` is left on.
    """
    pre = []
    for layer in inet.layers[:-1]:
        Z, D = apply_layer(layer, X, D)
        if keep_pre:
            pre.append((Z, D))
        X = np.maximum(Z, 0) if Z.dtype != object else np.where(Z > 0, Z, 0).astype(object)
    out, D = apply_layer(inet.layers[-1], X, D)
    if inet.final_clamp and clamp_output:
        out = np.maximum(out, 0) if out.dtype != object else np.where(out > 0, out, 0).astype(object)
    return out, D, pre


def patterns_batch(inet: IntegerNet, X: np.ndarray, D: int) -> np.ndarray:
    """Binary activation patterns, one row per point (uint8)."""
    _, _, pre = forward_batch(inet, X, D, keep_pre=True)
    if not pre:
        return np.zeros((X.shape[0], 0), dtype=np.uint8)
    return np.concatenate([(Z > 0).astype(np.uint8) for Z, _ in pre], axis=1)


def grid_numerators(x_den: int, y_den: int) -> tuple[np.ndarray, int]:
    """All points (i/x_den, j/y_den), 0 <= i <= x_den, 0 <= j <= y_den, x-major."""
    D = lcm(x_den, y_den)
    i = np.arange(x_den + 1, dtype=np.int64) * (D // x_den)
    j = np.arange(y_den + 1, dtype=np.int64) * (D // y_den)
    X = np.stack(np.meshgrid(i, j, indexing="ij"), axis=-1).reshape(-1, 2)
    return X, D
