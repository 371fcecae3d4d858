#!/usr/bin/env python3
"""Grid scan of the polarization-dependent beam-splitter experiment: the
wave-port conditional probability morphs from flat (particle-like) to full
fringes (wave-like) as the control polarization rotates.

Writes one CSV row per (theta, phi) point and prints per-theta visibilities.
"""

import argparse
import math

import numpy as np

from zpf_optics.cli import write_csv
from zpf_optics.detect import visibility
from zpf_optics.protocols import pdbs_point


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=5_000_000)
    parser.add_argument("--phi-points", type=int, default=9)
    parser.add_argument("--theta-steps", type=int, default=5,
                        help="control angles from 0 to pi/4 inclusive")
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--out", default="morphing_scan.csv")
    args = parser.parse_args()

    thetas = np.linspace(0.0, math.pi / 4, args.theta_steps)
    phis = np.linspace(0.0, 2.0 * math.pi, args.phi_points)
    rows = []
    for theta in thetas:
        curve = []
        for phi in phis:
            point = pdbs_point(float(theta), float(phi), trials=args.trials,
                               workers=args.workers)
            curve.append((point.phi, point.estimate))
            rows.append([point.theta, point.phi, point.numerator,
                         point.denominator, point.estimate,
                         point.ci95[0], point.ci95[1], point.accidentals])
        print(f"theta = {math.degrees(theta):5.2f} deg: "
              f"visibility {visibility(curve):.3f}")
    write_csv(["theta", "phi", "numerator", "denominator", "estimate",
               "ci_lo", "ci_hi", "accidentals"], rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
