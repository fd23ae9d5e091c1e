"""Min and max of d inputs as ReLU networks with weights in {0, ±1}, and
compilation of a DNF expression into one ReLU network.

A pairing round maps width m to ceil(m/2). Each pair (u, v) uses the block
``A = [[0, 1], [0, -1], [-1, 1]]`` followed by ``S = [1, -1, -1]``, which gives
``σ(v) - σ(-v) - σ(v - u) = min(u, v)``. An unpaired last element passes
through as ``σ(x) - σ(-x)``. The S of one round and the A of the next are
multiplied into a single affine layer; because the S rows of a round have
disjoint supports and every A row touches at most two of them with ±1, the
product stays ternary.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, log2

from .dnf import DnfExpression
from .relu_core import AffineLayer, ReluNetwork

F = Fraction
Mat = list[list[Fraction]]

PAIR_A = ((0, 1), (0, -1), (-1, 1))
PAIR_S = (1, -1, -1)
PASS_A = ((1,), (-1,))
PASS_S = (1, -1)


def _zeros(r: int, c: int) -> Mat:
    return [[F(0)] * c for _ in range(r)]


def matmul(A: Mat, B: Mat) -> Mat:
    if not A:
        return []
    n = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [F(0)] * n
        for j, a in enumerate(row):
            if a:
                for c, b in enumerate(B[j]):
                    if b:
                        acc[c] += a * b
        out.append(acc)
    return out


def matvec(A: Mat, v) -> list[Fraction]:
    return [sum((a * x for a, x in zip(row, v) if a), F(0)) for row in A]


def block_diag(*mats: Mat) -> Mat:
    rows = sum(len(m) for m in mats)
    cols = sum(len(m[0]) if m else 0 for m in mats)
    out = _zeros(rows, cols)
    r0 = c0 = 0
    for m in mats:
        for i, row in enumerate(m):
            for j, v in enumerate(row):
                out[r0 + i][c0 + j] = F(v)
        r0 += len(m)
        c0 += len(m[0]) if m else 0
    return out


def _round(m: int) -> tuple[Mat, Mat]:
    """One pairing round on width m: (A, S) with A: 3p+2o × m, S: ceil(m/2) × (3p+2o)."""
    blocks_a, blocks_s = [], []
    for _ in range(m // 2):
        blocks_a.append([list(r) for r in PAIR_A])
        blocks_s.append([list(PAIR_S)])
    if m % 2:
        blocks_a.append([list(r) for r in PASS_A])
        blocks_s.append([list(PASS_S)])
    return block_diag(*blocks_a), block_diag(*blocks_s)


def min_rounds(d: int) -> list[tuple[Mat, Mat]]:
    if d < 1:
        raise ValueError(f"min of {d} inputs is undefined")
    if d == 1:
        return [_round(1)]
    rounds = []
    m = d
    while m > 1:
        rounds.append(_round(m))
        m = (m + 1) // 2
    return rounds


def _negate(M: Mat) -> Mat:
    return [[-v for v in row] for row in M]


def max_rounds(d: int) -> list[tuple[Mat, Mat]]:
    """max(x) = -min(-x): flip the input columns of the first A and the last S."""
    rounds = min_rounds(d)
    A0, S0 = rounds[0]
    rounds[0] = (_negate(A0), S0)
    A1, S1 = rounds[-1]
    rounds[-1] = (A1, _negate(S1))
    return rounds


def identity_rounds(n: int) -> list[tuple[Mat, Mat]]:
    return [_round(1) for _ in range(n)]


def parallel_rounds(*channels: list[tuple[Mat, Mat]]) -> list[tuple[Mat, Mat]]:
    depth = {len(c) for c in channels}
    if len(depth) != 1:
        raise ValueError("parallel channels need the same number of rounds")
    return [
        (block_diag(*(c[i][0] for c in channels)), block_diag(*(c[i][1] for c in channels)))
        for i in range(depth.pop())
    ]


def rounds_to_layers(rounds: list[tuple[Mat, Mat]]) -> list[Mat]:
    """Weight matrices of the net: A_1, A_2·S_1, ..., S_R."""
    mats = [rounds[0][0]]
    for (_, S_prev), (A, _) in zip(rounds, rounds[1:]):
        mats.append(matmul(A, S_prev))
    mats.append(rounds[-1][1])
    return mats


def _net_from_mats(mats: list[Mat], meta: dict) -> ReluNetwork:
    layers = tuple(AffineLayer(tuple(map(tuple, W)), (F(0),) * len(W)) for W in mats)
    return ReluNetwork(layers, False, meta)


def build_min_net(d: int) -> ReluNetwork:
    return _net_from_mats(rounds_to_layers(min_rounds(d)), {"repr": "min", "d": d})


def build_max_net(d: int) -> ReluNetwork:
    return _net_from_mats(rounds_to_layers(max_rounds(d)), {"repr": "max", "d": d})


def expected_rounds(d: int) -> int:
    return 1 if d == 1 else ceil(log2(d))


def verify_ternary_weights(net: ReluNetwork, skip_first: bool = False) -> bool:
    layers = net.layers[1:] if skip_first else net.layers
    for layer in layers:
        if any(b != 0 for b in layer.biases):
            return False
        for row in layer.weights:
            if any(w not in (-1, 0, 1) for w in row):
                return False
    return True


def dnf_to_relu(expr: DnfExpression) -> ReluNetwork:
    """Compile ``min(externals, max-of-3 per dent, 0)`` into one ReLU network.

    The first affine layer evaluates all half-plane terms (merged with the
    first pairing round); every later layer is ternary with zero bias.
    """
    terms = expr.affine_terms()
    H = [[h.a, h.b] for h in terms]
    c = [h.c for h in terms]

    # externals pass through while each dent computes its max of 3 (2 rounds)
    stage = parallel_rounds(
        *([identity_rounds(2) for _ in expr.externals] + [max_rounds(3) for _ in expr.dents])
    )
    n_channels = len(expr.externals) + len(expr.dents)
    m = n_channels + (1 if expr.includes_zero_term else 0)
    mats = rounds_to_layers(stage)
    stage_out = mats.pop()
    if expr.includes_zero_term:
        stage_out = stage_out + [[F(0)] * len(stage_out[0])]
    tail = min_rounds(m)
    mats.append(matmul(tail[0][0], stage_out))
    mats.extend(rounds_to_layers(tail)[1:])

    first = mats[0]
    W1 = matmul(first, H)
    b1 = matvec(first, c)
    layers = [AffineLayer(tuple(map(tuple, W1)), tuple(b1))]
    layers += [AffineLayer(tuple(map(tuple, W)), (F(0),) * len(W)) for W in mats[1:]]
    return ReluNetwork(tuple(layers), False, {"repr": "dnf-compiled", "k": expr.k})
