"""Triadic expansion, the interval-walk activation code, and the O(k) pattern.

Interval convention for the walk: ``[0, 1/3]`` and ``[2/3, 1]`` are closed,
``(1/3, 2/3)`` is open. Landing exactly on 1/3 or 2/3 is recorded, because
there the corresponding ReLU pre-activation is exactly zero and the forward
pass emits the middle block rather than the side block.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .relu_core import ActivationPattern, to_fraction

THIRD = Fraction(1, 3)
TWO_THIRDS = Fraction(2, 3)
BLOCK = 5


@dataclass(frozen=True)
class TriadicDigits:
    digits: tuple[int, ...]
    cantor_flag: bool
    # x == sum(d_i / 3**i) + tail / 3**len(digits), with 0 <= tail <= 1
    tail: Fraction = Fraction(0)

    def truncated(self) -> Fraction:
        return sum((Fraction(d, 3**i) for i, d in enumerate(self.digits, 1)), Fraction(0))

    def value(self) -> Fraction:
        return self.truncated() + self.tail / 3 ** len(self.digits)

    def __str__(self) -> str:
        return "0." + "".join(map(str, self.digits))


@dataclass(frozen=True)
class ActivationCode:
    bits: tuple[int, ...]
    terminated_in_middle: bool
    # 1-based step at which the walk sat exactly on 1/3 or 2/3, if any
    endpoint_step: int | None = None

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


@dataclass(frozen=True)
class IntervalIndex:
    indices: tuple[int, ...]

    def __post_init__(self):
        if 2 in self.indices[:-1]:
            raise ValueError("a middle interval can only be the last index")


def triadic_digits(x: Any, precision: int) -> TriadicDigits:
    """Greedy base-3 expansion to ``precision`` digits.

    Where two expansions exist the one avoiding digit 1 is preferred, so
    1/3 reads 0.0222... and 1 reads 0.222...
    """
    x = to_fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"x={x} lies outside [0, 1]")
    digits = []
    r = x
    for _ in range(precision):
        t = 3 * r
        d = min(int(t), 2)
        rem = t - d
        if rem == 0 and d == 1:
            d, rem = 0, Fraction(1)
        elif rem == 0 and d == 2 and t == 3:
            rem = Fraction(1)
        digits.append(d)
        r = rem
    return TriadicDigits(tuple(digits), 1 not in digits, r)


def _walk(x: Any, k: int):
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise ValueError(f"recursion level must be a positive integer, got {k!r}")
    x = to_fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"x={x} lies outside [0, 1]")
    bits, indices = [], []
    endpoint = None
    middle = False
    tests = 0
    for step in range(1, k + 1):
        tests += 1
        if x <= THIRD:
            if x == THIRD and endpoint is None:
                endpoint = step
            x = 1 - 3 * x
            bits.append(0)
            indices.append(1)
        elif x < TWO_THIRDS:
            indices.append(2)
            middle = True
            break
        else:
            if x == TWO_THIRDS and endpoint is None:
                endpoint = step
            x = 3 * x - 2
            bits.append(1)
            indices.append(3)
    return ActivationCode(tuple(bits), middle, endpoint), IntervalIndex(tuple(indices)), tests


def activation_code(x: Any, k: int) -> ActivationCode:
    return _walk(x, k)[0]


def interval_index(x: Any, k: int) -> IntervalIndex:
    return _walk(x, k)[1]


def walk_step_count(x: Any, k: int) -> int:
    """Number of interval tests performed by the walk (never more than k)."""
    return _walk(x, k)[2]


def _block_bits(v: Fraction, y_positive: bool) -> tuple[int, ...]:
    left, right = 1 - 3 * v, 3 * v - 2
    a = max(left, 0) + max(right, 0)
    yb = int(y_positive)
    return (int(left > 0), int(right > 0), yb, int(a > 0), yb)


def _generator(v: Fraction) -> Fraction:
    return max(1 - 3 * v, Fraction(0), 3 * v - 2)


SIDE_BLOCKS = {0: _block_bits(Fraction(0), True), 1: _block_bits(Fraction(1), True)}
MIDDLE_BLOCK = _block_bits(Fraction(1, 2), True)


def _mask_y(block: tuple[int, ...], y_positive: bool) -> tuple[int, ...]:
    if y_positive:
        return block
    return (block[0], block[1], 0, block[3], 0)


def code_to_pattern(code: ActivationCode, k: int, y_positive: bool = True) -> ActivationPattern:
    """Expand an activation code to the full 5k-bit pattern of the recursive net."""
    n = len(code.bits)
    if n > k:
        raise ValueError(f"code of length {n} cannot come from level {k}")
    if n < k and not code.terminated_in_middle:
        raise ValueError("a code shorter than k must end in the middle interval")
    if code.terminated_in_middle and n >= k:
        raise ValueError("middle termination needs a free step")
    out: list[int] = []
    for step, bit in enumerate(code.bits, 1):
        block = MIDDLE_BLOCK if code.endpoint_step == step else SIDE_BLOCKS[bit]
        out.extend(_mask_y(block, y_positive))
    if code.terminated_in_middle:
        out.extend(_mask_y(MIDDLE_BLOCK, y_positive))
        # the middle maps to 0; continue the forward dynamics from there
        v = Fraction(0)
        for _ in range(n + 1, k):
            out.extend(_block_bits(v, y_positive))
            v = _generator(v)
    return ActivationPattern(tuple(out))


def pattern_fast(point, k: int, *, return_steps: bool = False):
    """Pattern of the level-k recursive net using exactly k block updates."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise ValueError(f"recursion level must be a positive integer, got {k!r}")
    x, y = (to_fraction(v) for v in point)
    y_positive = y > 0
    bits: list[int] = []
    steps = 0
    for _ in range(k):
        bits.extend(_block_bits(x, y_positive))
        x = _generator(x)
        steps += 1
    pattern = ActivationPattern(tuple(bits))
    return (pattern, steps) if return_steps else pattern
