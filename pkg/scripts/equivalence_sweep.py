"""Run the four-way equivalence check on the default grid for k = 1..KMAX."""

import argparse
import sys
import time

from cantornet.analysis import equivalence_check


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--kmax", type=int, default=6)
    p.add_argument("--jobs", type=int, default=1)
    args = p.parse_args()
    failed = False
    for k in range(1, args.kmax + 1):
        t0 = time.perf_counter()
        rep = equivalence_check(k, jobs=args.jobs)
        print(f"k={k} {rep.grid}: {rep.summary()} ({time.perf_counter() - t0:.1f}s)")
        failed |= not rep.passed
    sys.exit(2 if failed else 0)


if __name__ == "__main__":
    main()
