"""Efficiency at maximum power over (beta2/beta1, hbar*beta2*lambda): numeric optimum vs closed form.

Writes CSV to stdout.
"""
import argparse
import csv
import sys

import numpy as np

from otto_ne.optimize import PowerProblem, curzon_ahlborn, maximize_power
from otto_ne.thermo_core import CorrelatedPair


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta1", type=float, default=0.01)
    ap.add_argument("--mode", choices=("one-atom", "two-atom"), default="one-atom")
    ap.add_argument("--ratios", type=int, default=9, help="number of beta2/beta1 points in [0.1, 0.9]")
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["beta2_over_beta1", "hbar_beta2_lambda", "omega2_star", "eta_numeric", "eta_analytic",
                "eta_curzon_ahlborn", "discrepancy"])
    for r in np.linspace(0.1, 0.9, args.ratios):
        b2 = args.beta1 * r
        for x in (0.0, 0.05, 0.1):
            rep = maximize_power(PowerProblem(1.0, args.beta1, b2, CorrelatedPair(x / b2, args.mode)))
            w.writerow([f"{r:.17g}", x, f"{rep.omega2_star:.17g}", f"{rep.eta_at_max_power:.17g}",
                        f"{rep.eta_analytic:.17g}", f"{curzon_ahlborn(args.beta1, b2):.17g}",
                        f"{rep.discrepancy:.3e}"])


if __name__ == "__main__":
    main()
