"""Compare Monte Carlo real-zero densities with rho1 across (-r, r).

    python scripts/density_check.py --r 0.8 --bins 16 --samples 50000
"""

import argparse
import os

import numpy as np

from pfzeros import montecarlo as mc


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", type=float, default=0.8)
    ap.add_argument("--bins", type=int, default=16)
    ap.add_argument("--samples", type=int, default=50_000)
    ap.add_argument("--seed", type=int, default=mc.DEFAULT_SEED)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()

    edges = np.linspace(-args.r, args.r, args.bins + 1)
    reports = mc.estimate_rho1(list(zip(edges[:-1], edges[1:])), None, args.samples, args.seed, args.workers)
    print(f"{'bin':>18} {'estimate':>10} {'se':>8} {'bin avg':>10} {'z(avg)':>7}")
    for rep in reports:
        a, b = rep.details["bin"]
        avg = rep.details["bin_average"]
        z = (rep.estimate - avg) / rep.std_error if rep.std_error > 0 else float("nan")
        print(f"[{a:+.3f}, {b:+.3f}) {rep.estimate:10.5f} {rep.std_error:8.5f} {avg:10.5f} {z:+7.2f}")
    print(f"degree {reports[0].details['degree']}, {args.samples} draws")


if __name__ == "__main__":
    main()
