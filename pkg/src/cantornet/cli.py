"""Command-line interface.

Exit codes: 0 success or pass, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis
from .config import ENV_MAX_K, Caps
from .dnf import build_dnf, deserialize_dnf, dnf_value, serialize_dnf, structural_counts
from .minmax import build_max_net, build_min_net, dnf_to_relu, verify_ternary_weights
from .recursive import build_recursive_net
from .relu_core import (
    NetworkFormatError,
    activation_pattern,
    deserialize,
    forward,
    layer_count,
    neuron_count,
    serialize,
    to_fraction,
)
from .render import RENDERERS
from .triadic import activation_code, interval_index, pattern_fast, triadic_digits

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_point(text: str) -> tuple[Fraction, ...]:
    """``"1/2,3/4"`` or ``"0.5,0.75"``; decimals are converted exactly."""
    try:
        return tuple(to_fraction(part) for part in text.split(","))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad point {text!r}: {exc}") from None


def _check_k(args, repr_name: str = "recursive") -> None:
    cap = Caps.from_env(args.max_k).for_repr(repr_name)
    if args.k < 1 or args.k > cap:
        raise UsageError(
            f"k={args.k} outside the allowed range 1..{cap} for {repr_name} "
            f"(raise it with --max-k or {ENV_MAX_K})"
        )


def _write(path: str | None, data: bytes) -> None:
    if path is None:
        sys.stdout.buffer.write(data + b"\n")
        return
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def cmd_build(args) -> int:
    _check_k(args, args.repr)
    info = sys.stdout if args.out else sys.stderr
    if args.repr == "dnf":
        expr = build_dnf(args.k)
        n_affine, n_dents, r_k, dents_formula = structural_counts(expr)
        _write(args.out, serialize_dnf(expr))
        print(f"dnf k={args.k}: {n_affine} affine terms, {n_dents} dents "
              f"(r(k)={r_k}, floor(r/4)+1={dents_formula})", file=info)
        return EXIT_OK
    if args.repr == "recursive":
        net = build_recursive_net(args.k)
    else:
        net = dnf_to_relu(build_dnf(args.k))
    _write(args.out, serialize(net))
    line = f"{args.repr} k={args.k}: {neuron_count(net)} hidden neurons, {layer_count(net)} affine layers"
    if args.repr == "dnf-compiled":
        line += f", ternary after first layer: {verify_ternary_weights(net, skip_first=True)}"
    print(line, file=info)
    return EXIT_OK


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def cmd_eval(args) -> int:
    point = parse_point(args.point)
    if len(point) != 2:
        raise UsageError("--point needs two coordinates")
    if not all(0 <= v <= 1 for v in point):
        print("warning: point lies outside the unit square; evaluating anyway", file=sys.stderr)
    try:
        if args.net:
            net = deserialize(_read(args.net))
            value = forward(net, point)[0][0]
        else:
            value = dnf_value(deserialize_dnf(_read(args.expr)), point)
    except (NetworkFormatError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    label = "Inset" if value == 0 else "Outset"
    print(f"value {value}")
    print(label)
    return EXIT_OK


def cmd_pattern(args) -> int:
    _check_k(args)
    point = parse_point(args.point)
    if len(point) != 2:
        raise UsageError("--point needs two coordinates")
    if args.fast:
        pattern = pattern_fast(point, args.k)
    else:
        pattern = activation_pattern(build_recursive_net(args.k), point)
    print(";".join(pattern.blocks(5)) if args.blocks else str(pattern))
    return EXIT_OK


def cmd_triadic(args) -> int:
    _check_k(args)
    (x,) = parse_point(args.x)
    if not 0 <= x <= 1:
        raise UsageError("--x must lie in [0, 1]")
    code = activation_code(x, args.k)
    digits = triadic_digits(x, args.k)
    print(f"code {str(code) or '-'}")
    print(f"middle-terminated {str(code.terminated_in_middle).lower()}")
    if code.endpoint_step is not None:
        print(f"endpoint at step {code.endpoint_step}")
    print(f"interval {''.join(map(str, interval_index(x, args.k).indices))}")
    print(f"digits {digits} (cantor {str(digits.cantor_flag).lower()})")
    return EXIT_OK


def cmd_equiv(args) -> int:
    _check_k(args, "dnf")
    grid = analysis.GridSpec.parse(args.grid) if args.grid else None
    report = analysis.equivalence_check(args.k, grid, jobs=args.jobs)
    print(report.summary())
    if args.out:
        if args.out.endswith(".csv"):
            data = analysis.mismatches_to_csv(report)
        else:
            data = json.dumps(report.to_dict(), indent=2)
        _write(args.out, data.encode())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_report(args) -> int:
    if args.kmax < 1 or args.kmax > Caps.from_env(args.max_k).dnf:
        raise UsageError(f"--kmax {args.kmax} outside the allowed range")
    rows = analysis.complexity_report(args.kmax)
    text = analysis.rows_to_json(rows) if args.json else analysis.rows_to_csv(rows)
    if args.out:
        _write(args.out, text.encode())
    else:
        sys.stdout.write(text)
    ok = all(r.recursive_neurons == 5 * r.k and r.recursive_layers == 2 * r.k + 1 for r in rows)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_topology(args) -> int:
    _check_k(args, "dnf")
    rep = analysis.topology_check(args.k, args.resolution)
    print(f"resolution {rep.resolution} cells per side")
    print(f"components {rep.inset_components}/{rep.outset_components}, holes {rep.inset_holes}")
    return EXIT_OK if rep.inset_components == 1 and rep.inset_holes == 0 else EXIT_FAIL


def cmd_render(args) -> int:
    _check_k(args, "dnf")
    _write(args.out, RENDERERS[args.what](args.k).encode("utf-8"))
    return EXIT_OK


def cmd_minnet(args) -> int:
    if args.d < 1:
        raise UsageError("--d must be at least 1")
    net = build_max_net(args.d) if args.max else build_min_net(args.d)
    if args.eval:
        values = parse_point(args.eval)
        if len(values) != args.d:
            raise UsageError(f"--eval needs {args.d} values")
        print(forward(net, values)[0][0])
    if args.out:
        _write(args.out, serialize(net))
    print(f"{'max' if args.max else 'min'} d={args.d}: {neuron_count(net)} hidden neurons, "
          f"{layer_count(net)} affine layers, ternary {verify_ternary_weights(net)}",
          file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cantornet", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    kflags = _Parser(add_help=False)
    kflags.add_argument("--k", type=int, required=True, help="recursion level")
    kflags.add_argument("--max-k", type=int, default=None,
                        help=f"override the k cap (default 12 recursive, 8 dnf; env {ENV_MAX_K})")

    b = sub.add_parser("build", parents=[kflags], help="build a network or DNF expression file")
    b.add_argument("--repr", choices=("recursive", "dnf", "dnf-compiled"), required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("eval", help="evaluate a network or expression at a point")
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--net")
    src.add_argument("--expr")
    e.add_argument("--point", required=True, help='"x,y" as p/q or finite decimals')
    e.set_defaults(func=cmd_eval)

    pt = sub.add_parser("pattern", parents=[kflags], help="activation pattern of the recursive net")
    pt.add_argument("--point", required=True)
    pt.add_argument("--fast", action="store_true", help="k block updates instead of a full forward pass")
    pt.add_argument("--blocks", action="store_true", help="print 5-bit blocks separated by ';'")
    pt.set_defaults(func=cmd_pattern)

    t = sub.add_parser("triadic", parents=[kflags], help="interval-walk code, index and base-3 digits")
    t.add_argument("--x", required=True)
    t.set_defaults(func=cmd_triadic)

    q = sub.add_parser("equiv", parents=[kflags], help="check all four representations agree on a grid")
    q.add_argument("--grid", help="XDENxYDEN; default 3**(k+2)x128")
    q.add_argument("--jobs", type=int, default=1)
    q.add_argument("--out", help="write mismatches (.csv) or the full report (.json)")
    q.set_defaults(func=cmd_equiv)

    r = sub.add_parser("report", help="neuron and layer counts for k = 1..kmax")
    r.add_argument("--kmax", type=int, required=True)
    r.add_argument("--max-k", type=int, default=None)
    r.add_argument("--out")
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_report)

    tp = sub.add_parser(
        "topology", parents=[kflags],
        help="flood-fill component/hole counts; cells sampled at centres, width 1/(2*3**(k+1)) by default",
    )
    tp.add_argument("--resolution", type=int, help="cells per side, a multiple of 3**(k+1)")
    tp.set_defaults(func=cmd_topology)

    rd = sub.add_parser("render", parents=[kflags], help="write an SVG figure")
    rd.add_argument("--what", choices=sorted(RENDERERS), required=True)
    rd.add_argument("--out", required=True)
    rd.set_defaults(func=cmd_render)

    m = sub.add_parser("minnet", help="min (or max) network over d inputs")
    m.add_argument("--d", type=int, required=True)
    m.add_argument("--max", action="store_true")
    m.add_argument("--eval", help="comma-separated input values")
    m.add_argument("--out")
    m.set_defaults(func=cmd_minnet)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("cantornet: error: --jobs must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cantornet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
