"""Q* against stroke duration for linear and smooth ramps, with the sudden and adiabatic limits.

Writes CSV to stdout.
"""
import argparse
import csv
import sys

import numpy as np

from otto_ne.protocols import FrequencyProtocol, adiabaticity_Q, sudden_q_star


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--w1", type=float, default=1.0)
    ap.add_argument("--w2", type=float, default=2.0)
    ap.add_argument("--points", type=int, default=41)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["duration", "q_star_linear", "q_star_smooth", "drift_linear", "drift_smooth", "q_star_sudden"])
    qs = sudden_q_star(args.w1, args.w2)
    for tau in np.geomspace(1e-4, 500.0, args.points):
        lin = adiabaticity_Q(FrequencyProtocol.linear(args.w1, args.w2, tau))
        smo = adiabaticity_Q(FrequencyProtocol.smooth(args.w1, args.w2, tau))
        w.writerow([f"{tau:.17g}", f"{lin.q_star:.17g}", f"{smo.q_star:.17g}",
                    f"{lin.wronskian_drift:.2e}", f"{smo.wronskian_drift:.2e}", qs])


if __name__ == "__main__":
    main()
