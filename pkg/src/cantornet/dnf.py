"""Exact piecewise-linear boundary of the level-k manifold and its
min-over-dents (disjunctive normal form) representation.

Sign convention: a half-plane term is ``h(x, y) = line(x) - y``, non-negative
on and below the line. A point is in the inset iff
``min(externals, max-of-3 per dent, 0) == 0``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

import numpy as np

from .batch import apply_layer, compile_layer
from .relu_core import AffineLayer, format_fraction, to_fraction

F = Fraction
THIRD, TWO_THIRDS = F(1, 3), F(2, 3)


class DnfFormatError(ValueError):
    pass


@dataclass(frozen=True)
class HalfPlane:
    """``h(x, y) = a*x + b*y + c``."""

    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        for name in "abc":
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.a == 0 and self.b == 0:
            raise ValueError("degenerate half-plane: a and b are both zero")

    def __call__(self, x: Fraction, y: Fraction) -> Fraction:
        return self.a * x + self.b * y + self.c

    @classmethod
    def below_line(cls, slope, intercept) -> "HalfPlane":
        """Non-negative on and below ``y = slope*x + intercept``."""
        return cls(slope, F(-1), intercept)

    def to_dict(self) -> dict:
        return {"a": format_fraction(self.a), "b": format_fraction(self.b), "c": format_fraction(self.c)}


@dataclass(frozen=True)
class BoundaryPiece:
    lo: Fraction
    hi: Fraction
    slope: Fraction
    intercept: Fraction

    def __call__(self, x: Fraction) -> Fraction:
        return self.slope * x + self.intercept


@dataclass(frozen=True)
class PiecewiseBoundary:
    pieces: tuple[BoundaryPiece, ...]

    def __post_init__(self):
        ps = self.pieces
        if not ps or ps[0].lo != 0 or ps[-1].hi != 1:
            raise ValueError("pieces must cover [0, 1]")
        for p, q in zip(ps, ps[1:]):
            if p.hi != q.lo:
                raise ValueError(f"gap or overlap at {p.hi} / {q.lo}")
            if p(p.hi) != q(q.lo):
                raise ValueError(f"boundary is discontinuous at {p.hi}")
        for p in ps:
            if p.lo >= p.hi:
                raise ValueError(f"empty piece [{p.lo}, {p.hi}]")

    def __len__(self) -> int:
        return len(self.pieces)

    def __call__(self, x: Any) -> Fraction:
        x = to_fraction(x)
        for p in self.pieces:
            if p.lo <= x <= p.hi:
                return p(x)
        raise ValueError(f"x={x} lies outside [0, 1]")

    def breakpoints(self) -> list[Fraction]:
        return [self.pieces[0].lo] + [p.hi for p in self.pieces]

    def vertices(self) -> list[tuple[Fraction, Fraction]]:
        return [(x, self(x)) for x in self.breakpoints()]


@dataclass(frozen=True)
class Dent:
    descend: HalfPlane
    flat: HalfPlane
    ascend: HalfPlane
    span: tuple[Fraction, Fraction]

    def terms(self) -> tuple[HalfPlane, HalfPlane, HalfPlane]:
        return (self.descend, self.flat, self.ascend)

    def value(self, x: Fraction, y: Fraction) -> Fraction:
        return max(h(x, y) for h in self.terms())

    def to_dict(self) -> dict:
        return {
            "descend": self.descend.to_dict(),
            "flat": self.flat.to_dict(),
            "ascend": self.ascend.to_dict(),
            "span": [format_fraction(self.span[0]), format_fraction(self.span[1])],
        }


@dataclass(frozen=True)
class DnfExpression:
    externals: tuple[HalfPlane, ...]
    dents: tuple[Dent, ...]
    k: int | None = None
    includes_zero_term: bool = field(default=True)

    def affine_terms(self) -> list[HalfPlane]:
        return list(self.externals) + [h for d in self.dents for h in d.terms()]


# --- boundary construction -------------------------------------------------


def _compose_with_generator(pieces: Iterable[tuple]) -> list[tuple]:
    """Pieces (lo, hi, slope, intercept) of A∘f given the pieces of f."""
    out = []
    for lo, hi, s, c in pieces:
        cuts = {lo, hi}
        if s != 0:
            for level in (THIRD, TWO_THIRDS):
                t = (level - c) / s
                if lo < t < hi:
                    cuts.add(t)
        cuts = sorted(cuts)
        for a, b in zip(cuts, cuts[1:]):
            v = s * (a + b) / 2 + c
            if v <= THIRD:
                out.append((a, b, -3 * s, 1 - 3 * c))
            elif v < TWO_THIRDS:
                out.append((a, b, F(0), F(0)))
            else:
                out.append((a, b, 3 * s, 3 * c - 2))
    return out


def generator_pieces(k: int) -> list[tuple]:
    """Exact linear pieces of the k-fold generating function on [0, 1]."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise ValueError(f"recursion level must be a positive integer, got {k!r}")
    pieces = [(F(0), F(1), F(1), F(0))]  # identity
    for _ in range(k):
        pieces = _compose_with_generator(pieces)
    return pieces


def boundary_pieces(k: int) -> PiecewiseBoundary:
    return PiecewiseBoundary(
        tuple(BoundaryPiece(lo, hi, s / 2, (c + 1) / 2) for lo, hi, s, c in generator_pieces(k))
    )


def extract_dents(boundary: PiecewiseBoundary) -> list[Dent]:
    """One dent per maximal run of pieces not lying on the line y = 1."""
    runs: list[list[BoundaryPiece]] = []
    current: list[BoundaryPiece] = []
    for p in boundary.pieces:
        on_top = p.slope == 0 and p.intercept == 1
        if on_top:
            if current:
                runs.append(current)
                current = []
        else:
            current.append(p)
    if current:
        runs.append(current)

    dents = []
    for run in runs:
        if len(run) != 3:
            raise ValueError(f"notch at x={run[0].lo} has {len(run)} pieces, expected 3")
        d, f, a = run
        if not (d.slope < 0 and f.slope == 0 and a.slope > 0):
            raise ValueError(f"notch at x={d.lo} is not descend/flat/ascend")
        if d(d.lo) != 1 or a(a.hi) != 1:
            raise ValueError(f"notch at x={d.lo} does not start and end at height 1")
        dents.append(
            Dent(
                HalfPlane.below_line(d.slope, d.intercept),
                HalfPlane.below_line(f.slope, f.intercept),
                HalfPlane.below_line(a.slope, a.intercept),
                (d.lo, a.hi),
            )
        )
    return dents


# y <= 1, x >= 0, x <= 1
EXTERNALS = (
    HalfPlane(F(0), F(-1), F(1)),
    HalfPlane(F(1), F(0), F(0)),
    HalfPlane(F(-1), F(0), F(1)),
)


def build_dnf(k: int) -> DnfExpression:
    return DnfExpression(EXTERNALS, tuple(extract_dents(boundary_pieces(k))), k)


def dnf_value(expr: DnfExpression, point) -> Fraction:
    x, y = (to_fraction(v) for v in point)
    terms = [h(x, y) for h in expr.externals]
    terms += [d.value(x, y) for d in expr.dents]
    if expr.includes_zero_term:
        terms.append(F(0))
    return min(terms)


def dnf_is_inset(expr: DnfExpression, point) -> bool:
    return dnf_value(expr, point) == 0


def r_formula(k: int) -> int:
    return 2 ** (k + 1) - 1


def dent_formula(k: int) -> int:
    return r_formula(k) // 4 + 1


def structural_counts(expr: DnfExpression) -> tuple[int, int, int | None, int | None]:
    """(affine terms, dents, r(k), floor(r(k)/4)+1); closed forms are None without k."""
    n_affine = len(expr.externals) + 3 * len(expr.dents)
    if expr.k is None:
        return n_affine, len(expr.dents), None, None
    return n_affine, len(expr.dents), r_formula(expr.k), dent_formula(expr.k)


# --- vectorized evaluation -------------------------------------------------


def dnf_values_batch(expr: DnfExpression, X: np.ndarray, D: int) -> tuple[np.ndarray, int]:
    """Exact DNF values on integer point numerators; returns (numerators, denominator)."""
    terms = expr.affine_terms()
    layer = compile_layer(AffineLayer(tuple((h.a, h.b) for h in terms), tuple(h.c for h in terms)))
    Z, den = apply_layer(layer, X, D)
    ne = len(expr.externals)
    cols = [Z[:, :ne]]
    if expr.dents:
        dents = Z[:, ne:].reshape(Z.shape[0], len(expr.dents), 3).max(axis=2)
        cols.append(dents)
    if expr.includes_zero_term:
        cols.append(np.zeros((Z.shape[0], 1), dtype=Z.dtype))
    return np.concatenate(cols, axis=1).min(axis=1), den


# --- serialization -----------------------------------------------------------


def dnf_to_dict(expr: DnfExpression) -> dict:
    return {
        "k": expr.k,
        "externals": [h.to_dict() for h in expr.externals],
        "dents": [d.to_dict() for d in expr.dents],
    }


def serialize_dnf(expr: DnfExpression) -> bytes:
    return json.dumps(dnf_to_dict(expr), sort_keys=True, separators=(",", ":")).encode("utf-8")


def _half_plane(obj: Any, where: str) -> HalfPlane:
    if not isinstance(obj, dict):
        raise DnfFormatError(f"{where}: expected an object")
    vals = []
    for key in "abc":
        raw = obj.get(key)
        if not isinstance(raw, str):
            raise DnfFormatError(f"{where}.{key}: expected a rational string")
        try:
            vals.append(to_fraction(raw))
        except ValueError as exc:
            raise DnfFormatError(f"{where}.{key}: {exc}") from None
    try:
        return HalfPlane(*vals)
    except ValueError as exc:
        raise DnfFormatError(f"{where}: {exc}") from None


def dnf_from_dict(obj: Any) -> DnfExpression:
    if not isinstance(obj, dict):
        raise DnfFormatError("top level: expected an object")
    k = obj.get("k")
    if k is not None and (isinstance(k, bool) or not isinstance(k, int)):
        raise DnfFormatError("k: expected an integer")
    ext = obj.get("externals")
    dents = obj.get("dents")
    if not isinstance(ext, list) or not isinstance(dents, list):
        raise DnfFormatError("externals/dents: expected arrays")
    externals = tuple(_half_plane(h, f"externals[{i}]") for i, h in enumerate(ext))
    parsed = []
    for i, d in enumerate(dents):
        where = f"dents[{i}]"
        if not isinstance(d, dict):
            raise DnfFormatError(f"{where}: expected an object")
        span = d.get("span")
        if not isinstance(span, list) or len(span) != 2 or not all(isinstance(s, str) for s in span):
            raise DnfFormatError(f"{where}.span: expected two rational strings")
        try:
            lo, hi = to_fraction(span[0]), to_fraction(span[1])
        except ValueError as exc:
            raise DnfFormatError(f"{where}.span: {exc}") from None
        parsed.append(
            Dent(
                _half_plane(d.get("descend"), f"{where}.descend"),
                _half_plane(d.get("flat"), f"{where}.flat"),
                _half_plane(d.get("ascend"), f"{where}.ascend"),
                (lo, hi),
            )
        )
    return DnfExpression(externals, tuple(parsed), k)


def deserialize_dnf(data: bytes | str) -> DnfExpression:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise DnfFormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return dnf_from_dict(obj)
