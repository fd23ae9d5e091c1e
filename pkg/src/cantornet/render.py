"""Deterministic SVG figures. This is the only place exact values are
turned into decimals (9 digits)."""

from __future__ import annotations

import hashlib
from fractions import Fraction

from .dnf import build_dnf, boundary_pieces, generator_pieces
from .recursive import build_recursive_net
from .relu_core import activation_pattern

SIZE = 600
MARGIN = 20


def _num(q: Fraction | float) -> str:
    s = f"{float(q):.9f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _xy(x, y) -> tuple[str, str]:
    # y grows upward in the figure
    return _num(MARGIN + Fraction(x) * SIZE), _num(MARGIN + (1 - Fraction(y)) * SIZE)


def _svg(body: list[str], title: str) -> str:
    w = SIZE + 2 * MARGIN
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{w}" viewBox="0 0 {w} {w}">',
        f"<title>{title}</title>",
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="white" stroke="black"/>',
    ]
    return "\n".join(head + body + ["</svg>", ""])


def _boundary_polyline(k: int) -> tuple[str, int]:
    b = boundary_pieces(k)
    pts = " ".join(",".join(_xy(x, y)) for x, y in b.vertices())
    return pts, len(b)


def _inset_polygon(k: int) -> str:
    b = boundary_pieces(k)
    pts = [(Fraction(0), Fraction(0))] + b.vertices() + [(Fraction(1), Fraction(0))]
    coords = " ".join(",".join(_xy(x, y)) for x, y in pts)
    return f'<polygon class="inset" points="{coords}" fill="#c8c8c8" stroke="none"/>'


def render_boundary(k: int) -> str:
    pts, n = _boundary_polyline(k)
    body = [
        _inset_polygon(k),
        f'<polyline class="boundary" data-segments="{n}" points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>',
    ]
    return _svg(body, f"boundary k={k}")


def _pattern_colour(bits: str) -> str:
    h = hashlib.sha256(bits.encode()).hexdigest()
    r, g, b = (128 + int(h[i : i + 2], 16) // 2 for i in (0, 2, 4))
    return f"#{r:02x}{g:02x}{b:02x}"


def pattern_strips(k: int) -> list[tuple[Fraction, Fraction, str]]:
    """Maximal x-intervals of constant activation pattern (for y > 0).

    Hidden patterns of the recursive net do not depend on y once y > 0, so
    regions are vertical strips between the kinks of the nested maps.
    """
    cuts = sorted({x for j in range(1, k + 1) for lo, hi, _, _ in generator_pieces(j) for x in (lo, hi)})
    net = build_recursive_net(k)
    y = Fraction(1, 2)
    strips: list[tuple[Fraction, Fraction, str]] = []
    for a, b in zip(cuts, cuts[1:]):
        bits = str(activation_pattern(net, ((a + b) / 2, y)))
        if strips and strips[-1][2] == bits:
            strips[-1] = (strips[-1][0], b, bits)
        else:
            strips.append((a, b, bits))
    return strips


def render_tessellation(k: int) -> str:
    body = []
    for a, b, bits in pattern_strips(k):
        x0, y0 = _xy(a, 1)
        width = _num((b - a) * SIZE)
        body.append(
            f'<rect class="region" data-pattern="{bits}" x="{x0}" y="{y0}" width="{width}" '
            f'height="{SIZE}" fill="{_pattern_colour(bits)}" stroke="white" stroke-width="0.5"/>'
        )
    pts, n = _boundary_polyline(k)
    body.append(f'<polyline class="boundary" points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>')
    return _svg(body, f"tessellation k={k}")


def render_dnf_lines(k: int) -> str:
    expr = build_dnf(k)
    body = [_inset_polygon(k)]
    colours = ("#d62728", "#1f77b4", "#2ca02c")
    for idx, dent in enumerate(expr.dents):
        lo, hi = dent.span
        parts = []
        for h, colour in zip(dent.terms(), colours):
            # line(x) = a*x + c since b == -1
            y0, y1 = h.a * lo + h.c, h.a * hi + h.c
            x_0, y_0 = _xy(lo, y0)
            x_1, y_1 = _xy(hi, y1)
            parts.append(
                f'<line x1="{x_0}" y1="{y_0}" x2="{x_1}" y2="{y_1}" stroke="{colour}" stroke-width="0.8"/>'
            )
        body.append(f'<g class="dent" data-index="{idx + 1}">' + "".join(parts) + "</g>")
    pts, _ = _boundary_polyline(k)
    body.append(f'<polyline class="boundary" points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>')
    return _svg(body, f"dnf dents k={k}")


RENDERERS = {
    "boundary": render_boundary,
    "tessellation": render_tessellation,
    "dnf-lines": render_dnf_lines,
}
