"""Print neuron/layer counts of both representations for k = 1..KMAX as CSV."""

import argparse

from cantornet.analysis import complexity_report, fitted_layer_constant, rows_to_csv


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--kmax", type=int, default=8)
    args = p.parse_args()
    rows = complexity_report(args.kmax)
    print(rows_to_csv(rows), end="")
    ks = [r.k for r in rows]
    print(f"# layer constant: recursive {fitted_layer_constant([r.recursive_layers for r in rows], ks):.2f}, "
          f"dnf {fitted_layer_constant([r.dnf_layers for r in rows], ks):.2f}")


if __name__ == "__main__":
    main()
