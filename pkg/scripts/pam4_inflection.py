"""Locate the inflection of the 4-PAM outer-to-inner pairwise error probability.

Prints the concave/convex band from the thresholds, the refined bracket, and
writes the curvature sweep (analytic and finite-difference) as CSV.
"""

import argparse
from pathlib import Path

import numpy as np

from berconvex import __version__, find_inflections, parse_constellation, sweep, thresholds
from berconvex.reports import header, render_csv, write_atomic


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=129)
    ap.add_argument("--out", type=Path, default=Path("results/pam4_inflection.csv"))
    args = ap.parse_args()

    c = parse_constellation("pam:4:gray")
    t = thresholds(c)
    band = t.pep_bands[(0, 1)]
    grid = np.geomspace(band.lower / 10, band.upper * 10, args.points)
    s = sweep(c, "pep:0,1", "snr", grid)
    res = find_inflections(s)
    print(f"d_max of inner point = {t.d_max_per_point[1]:.12f} (1/sqrt5 = {5 ** -0.5:.12f})")
    print(f"band: concave below {band.lower:.6f}, convex above {band.upper:.6f}")
    for b in res.brackets:
        print(f"inflection in [{b.lower:.6f}, {b.upper:.6f}] (refined={b.refined})")
    print(f"count={res.count} parity={res.parity}")
    write_atomic(args.out, render_csv(s.rows(), header(__version__)))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
