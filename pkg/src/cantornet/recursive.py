"""Generating function, its nesting, the exact membership oracle, and the
recursion-based CantorNet."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .relu_core import AffineLayer, ReluNetwork, to_fraction

F = Fraction


class ManifoldLabel(enum.Enum):
    INSET = "Inset"
    OUTSET = "Outset"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class RecursiveBlueprint:
    """Constant weights of one recursion block and of the readout layer."""

    W1: tuple = ((F(-3), F(0)), (F(3), F(0)), (F(0), F(1)))
    b1: tuple = (F(1), F(-2), F(0))
    W2: tuple = ((F(1), F(1), F(0)), (F(0), F(0), F(1)))
    # the second stage of a block has no bias
    b2: tuple = (F(0), F(0))
    WL: tuple = ((F(-1, 2), F(1)),)
    bL: tuple = (F(-1, 2),)


BLUEPRINT = RecursiveBlueprint()


def _check_unit(x: Fraction, name: str = "x") -> None:
    if not 0 <= x <= 1:
        raise ValueError(f"{name}={x} lies outside [0, 1]")


def _check_k(k: int) -> None:
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise ValueError(f"recursion level must be a positive integer, got {k!r}")


def generating_function(x: Any) -> Fraction:
    x = to_fraction(x)
    _check_unit(x)
    return max(1 - 3 * x, F(0), 3 * x - 2)


def nested_generating(x: Any, k: int) -> Fraction:
    _check_k(k)
    x = to_fraction(x)
    for _ in range(k):
        x = generating_function(x)
    return x


def boundary_height(x: Any, k: int) -> Fraction:
    return (nested_generating(x, k) + 1) / 2


def membership_oracle(point, k: int) -> ManifoldLabel:
    x, y = (to_fraction(v) for v in point)
    _check_unit(y, "y")
    return ManifoldLabel.INSET if y <= boundary_height(x, k) else ManifoldLabel.OUTSET


def _block_layers(bp: RecursiveBlueprint, keep_y: bool) -> list[AffineLayer]:
    if keep_y:
        return [AffineLayer(bp.W1, bp.b1), AffineLayer(bp.W2, bp.b2)]
    W1 = tuple(row[:1] for row in bp.W1[:2])
    W2 = (bp.W2[0][:2],)
    return [AffineLayer(W1, bp.b1[:2]), AffineLayer(W2, bp.b2[:1])]


def build_recursive_net(k: int, *, final_clamp: bool = True, blueprint=BLUEPRINT) -> ReluNetwork:
    """k recursion blocks followed by the readout ``y - (A^k(x) + 1)/2``.

    With ``final_clamp`` the output is zero exactly on the inset.
    """
    _check_k(k)
    layers = []
    for _ in range(k):
        layers.extend(_block_layers(blueprint, keep_y=True))
    layers.append(AffineLayer(blueprint.WL, blueprint.bL))
    return ReluNetwork(tuple(layers), final_clamp, {"repr": "recursive", "k": k})


def build_recursive_net_1d(k: int, *, blueprint=BLUEPRINT) -> ReluNetwork:
    """One-input variant: the y-row is dropped, the output is ``A^k(x)``."""
    _check_k(k)
    layers = []
    for _ in range(k):
        layers.extend(_block_layers(blueprint, keep_y=False))
    layers.append(AffineLayer(((F(1),),), (F(0),)))
    return ReluNetwork(tuple(layers), False, {"repr": "recursive-1d", "k": k})
