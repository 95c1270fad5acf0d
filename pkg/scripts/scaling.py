#!/usr/bin/env python3
"""Time the interval solver on growing inputs and report the doubling ratio.

Uses the same generator settings as the acceptance scaling check
(ell = 25, span range 4n); each size is timed as the best of --repeats runs.
"""

import argparse
import time

from happycw.interval import solve_mhv_interval
from happycw.oracle import GenConfig, gen_interval


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="250,500,1000,2000")
    parser.add_argument("--ell", type=int, default=25)
    parser.add_argument("--seed", type=int, default=4)
    parser.add_argument("--repeats", type=int, default=2)
    args = parser.parse_args()

    prev = None
    print(f"{'n':>6} {'seconds':>9} {'ratio':>6}")
    for n in map(int, args.sizes.split(",")):
        inst = gen_interval(GenConfig(seed=args.seed, n=n, ell=args.ell, density=0.3, span_range=4 * n))
        best = float("inf")
        for _ in range(args.repeats):
            start = time.perf_counter()
            solve_mhv_interval(inst)
            best = min(best, time.perf_counter() - start)
        ratio = f"{best / prev:6.2f}" if prev else "     -"
        print(f"{n:>6} {best:>9.3f} {ratio}")
        prev = best


if __name__ == "__main__":
    main()
