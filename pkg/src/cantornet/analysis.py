"""Cross-representation equivalence, pattern/region grouping, complexity rows,
and a rasterized connectivity check of the inset."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import ndimage

from .batch import (
    IntegerNet,
    apply_layer,
    compile_layer,
    compile_network,
    forward_batch,
    patterns_batch,
    points_to_integers,
)
from .dnf import DnfExpression, build_dnf, dnf_values_batch, r_formula
from .minmax import dnf_to_relu
from .recursive import boundary_height, build_recursive_net
from .relu_core import (
    ActivationPattern,
    AffineLayer,
    ReluNetwork,
    affine_map_for_pattern,
    format_fraction,
    layer_count,
    neuron_count,
)

REPRESENTATIONS = ("oracle", "recursive", "dnf", "dnf_compiled")
CSV_COLUMNS = ("k", "recursive_neurons", "recursive_layers", "dnf_neurons", "dnf_layers", "r_k", "z_k")
CHUNK = 60_000


@dataclass(frozen=True)
class GridSpec:
    """Points (i/x_den, j/y_den) for 0 <= i <= x_den, 0 <= j <= y_den."""

    x_den: int
    y_den: int = 128

    @classmethod
    def default(cls, k: int) -> "GridSpec":
        return cls(3 ** (k + 2), 128)

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """``"729x128"`` or ``"729,128"``."""
        parts = text.lower().replace(",", "x").split("x")
        if len(parts) != 2:
            raise ValueError(f"grid must look like XDENxYDEN, got {text!r}")
        x_den, y_den = (int(p) for p in parts)
        if x_den < 1 or y_den < 1:
            raise ValueError("grid denominators must be positive")
        return cls(x_den, y_den)

    @property
    def size(self) -> int:
        return (self.x_den + 1) * (self.y_den + 1)

    def __str__(self) -> str:
        return f"x=i/{self.x_den}, y=j/{self.y_den}"


@dataclass
class EquivalenceReport:
    k: int
    grid: str
    points_tested: int
    mismatches: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def summary(self) -> str:
        state = "PASS" if self.passed else "FAIL"
        return f"{state} {len(self.mismatches)} mismatches / {self.points_tested} points"

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "grid": self.grid,
            "points_tested": self.points_tested,
            "pass": self.passed,
            "mismatches": [
                {"x": format_fraction(x), "y": format_fraction(y), **labels}
                for (x, y), labels in self.mismatches
            ],
        }


@dataclass(frozen=True)
class ComplexityRow:
    k: int
    recursive_neurons: int
    recursive_layers: int
    dnf_neurons: int
    dnf_layers: int
    r_k: int
    z_k: int


@dataclass(frozen=True)
class TopologyReport:
    k: int
    resolution: int
    inset_components: int
    inset_holes: int
    outset_components: int


@dataclass(frozen=True)
class RegionGroup:
    pattern: ActivationPattern
    representative: tuple[Fraction, ...]
    matrix: tuple
    offset: tuple
    count: int
    violations: int = 0


# --- equivalence -------------------------------------------------------------


def _oracle_column(k: int, x: Fraction, y_den: int) -> np.ndarray:
    h = boundary_height(x, k)
    j = np.arange(y_den + 1, dtype=object)
    return j * h.denominator <= y_den * h.numerator


def _label_chunk(args):
    k, grid, i_lo, i_hi, expr, rec, comp = args
    x_den, y_den = grid.x_den, grid.y_den
    D = x_den * y_den
    i = np.arange(i_lo, i_hi, dtype=np.int64)
    j = np.arange(y_den + 1, dtype=np.int64)
    X = np.stack(np.meshgrid(i * y_den, j * x_den, indexing="ij"), axis=-1).reshape(-1, 2)

    oracle = np.concatenate([_oracle_column(k, Fraction(int(ii), x_den), y_den) for ii in i]).astype(bool)
    rec_out, _, _ = forward_batch(rec, X, D)
    dnf_out, _ = dnf_values_batch(expr, X, D)
    comp_out, _, _ = forward_batch(comp, X, D)
    labels = np.stack([oracle, rec_out[:, 0] == 0, dnf_out == 0, comp_out[:, 0] == 0], axis=1)
    bad = np.nonzero(~(labels.all(axis=1) | (~labels).all(axis=1)))[0]
    out = []
    for b in bad:
        x = Fraction(int(X[b, 0]), D)
        y = Fraction(int(X[b, 1]), D)
        out.append(((x, y), {name: ("Inset" if labels[b, n] else "Outset") for n, name in enumerate(REPRESENTATIONS)}))
    return out


def equivalence_check(
    k: int,
    grid: GridSpec | None = None,
    *,
    expr: DnfExpression | None = None,
    recursive_net: ReluNetwork | None = None,
    compiled_net: ReluNetwork | None = None,
    jobs: int = 1,
) -> EquivalenceReport:
    """Compare oracle, recursive net, DNF expression and compiled DNF net pointwise.

    Each representation defaults to a fresh construction at level ``k``.
    """
    grid = grid or GridSpec.default(k)
    expr = expr if expr is not None else build_dnf(k)
    rec = compile_network(recursive_net if recursive_net is not None else build_recursive_net(k))
    comp = compile_network(compiled_net if compiled_net is not None else dnf_to_relu(expr))

    cols_per_chunk = max(1, CHUNK // (grid.y_den + 1))
    tasks = [
        (k, grid, lo, min(lo + cols_per_chunk, grid.x_den + 1), expr, rec, comp)
        for lo in range(0, grid.x_den + 1, cols_per_chunk)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_label_chunk, tasks))
    else:
        results = [_label_chunk(t) for t in tasks]
    mismatches = sorted((m for r in results for m in r), key=lambda m: m[0])
    return EquivalenceReport(k, str(grid), grid.size, mismatches)


# --- regions -----------------------------------------------------------------


def grid_points(grid: GridSpec) -> tuple[np.ndarray, int]:
    D = grid.x_den * grid.y_den
    i = np.arange(grid.x_den + 1, dtype=np.int64) * grid.y_den
    j = np.arange(grid.y_den + 1, dtype=np.int64) * grid.x_den
    return np.stack(np.meshgrid(i, j, indexing="ij"), axis=-1).reshape(-1, 2), D


def region_enumeration(net: ReluNetwork, domain) -> list[RegionGroup]:
    """Group sample points by activation pattern and check each group against
    a single exact affine map.

    ``domain`` is a GridSpec (2-D nets), a sequence of rational points, or a
    ``(numerators, denominator)`` pair. Only patterns hit by a sample are
    reported; this is not an exact arrangement count.
    """
    if isinstance(domain, GridSpec):
        X, D = grid_points(domain)
    elif isinstance(domain, tuple) and len(domain) == 2 and isinstance(domain[0], np.ndarray):
        X, D = domain
    else:
        X, D = points_to_integers(list(domain))
    inet = compile_network(net)
    out, Dout, pre = forward_batch(inet, X, D, keep_pre=True, clamp_output=False)
    if pre:
        pats = np.concatenate([(Z > 0).astype(np.uint8) for Z, _ in pre], axis=1)
    else:
        pats = np.zeros((X.shape[0], 0), dtype=np.uint8)
    uniq, first, inverse = np.unique(pats, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    groups = []
    for g in np.argsort(first):
        members = np.nonzero(inverse == g)[0]
        pattern = ActivationPattern(tuple(int(b) for b in uniq[g]))
        M, c = affine_map_for_pattern(net, pattern)
        Zm, Dm = apply_layer(compile_layer(AffineLayer(M, c)), X[members], D)
        lhs = out[members].astype(object) * Dm
        rhs = Zm.astype(object) * Dout
        violations = int(np.count_nonzero((lhs != rhs).any(axis=1)))
        rep = tuple(Fraction(int(v), D) for v in X[members[0]])
        groups.append(RegionGroup(pattern, rep, M, c, len(members), violations))
    return groups


# --- complexity --------------------------------------------------------------


def z_formula(k: int) -> int:
    return 3 * (r_formula(k) // 4) + 6


def complexity_row(k: int) -> ComplexityRow:
    rec = build_recursive_net(k)
    comp = dnf_to_relu(build_dnf(k))
    return ComplexityRow(
        k, neuron_count(rec), layer_count(rec), neuron_count(comp), layer_count(comp),
        r_formula(k), z_formula(k),
    )


def complexity_report(k_max: int) -> list[ComplexityRow]:
    return [complexity_row(k) for k in range(1, k_max + 1)]


def fitted_layer_constant(values: Sequence[int], ks: Sequence[int]) -> float:
    """Smallest c with values[i] <= c * ks[i] for every row."""
    return max(v / k for v, k in zip(values, ks))


def rows_to_csv(rows: Sequence[ComplexityRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([getattr(r, c) for c in CSV_COLUMNS])
    return buf.getvalue()


def rows_to_json(rows: Sequence[ComplexityRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2)


def mismatches_to_csv(report: EquivalenceReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("x", "y") + REPRESENTATIONS)
    for (x, y), labels in report.mismatches:
        w.writerow([format_fraction(x), format_fraction(y)] + [labels[n] for n in REPRESENTATIONS])
    return buf.getvalue()


# --- topology ----------------------------------------------------------------

FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])


def inset_raster(k: int, cells_per_side: int) -> np.ndarray:
    """Boolean raster (row = y index from the bottom, col = x index) of the
    inset, sampled at cell centres ((2i+1)/(2n), (2j+1)/(2n))."""
    n = cells_per_side
    j = np.arange(n, dtype=object)
    cols = []
    for i in range(n):
        h = boundary_height(Fraction(2 * i + 1, 2 * n), k)
        cols.append((2 * j + 1) * h.denominator <= 2 * n * h.numerator)
    return np.stack(cols, axis=1).astype(bool)


def topology_check(k: int, resolution: int | None = None) -> TopologyReport:
    """Flood-fill component and hole counts of the rasterized inset.

    ``resolution`` is the number of cells per side; the default is
    ``2 * 3**(k+1)`` so the cell width divides ``3**-(k+1)``.
    """
    n = resolution or 2 * 3 ** (k + 1)
    if n % 3 ** (k + 1):
        raise ValueError(f"resolution must be a multiple of 3**{k + 1}")
    inset = inset_raster(k, n)
    _, inset_components = ndimage.label(inset, structure=FOUR_CONNECTED)
    _, outset_components = ndimage.label(~inset, structure=FOUR_CONNECTED)
    # holes are complement components that do not reach the outside of the square
    padded = np.pad(~inset, 1, constant_values=True)
    _, padded_components = ndimage.label(padded, structure=FOUR_CONNECTED)
    return TopologyReport(k, n, int(inset_components), int(padded_components) - 1, int(outset_components))
