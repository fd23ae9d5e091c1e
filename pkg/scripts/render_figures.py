"""Write every SVG figure for k = 1..KMAX into OUTDIR."""

import argparse
from pathlib import Path

from cantornet.render import RENDERERS


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--outdir", default="figures")
    args = p.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, render in sorted(RENDERERS.items()):
        for k in range(1, args.kmax + 1):
            path = out / f"{name}_k{k}.svg"
            path.write_text(render(k), encoding="utf-8")
            print(path)


if __name__ == "__main__":
    main()
