"""Coherent reservoir: error of the first-order EMP formula against the numeric optimum.

For each phase, prints |numeric - analytic|/eps^2 at shrinking eps for the
corrected expansion and for the variant with the inverted inner ratio.
A bounded column means second-order agreement.
"""
import argparse
import math

from otto_ne.optimize import PowerProblem, emp_coherent, maximize_power
from otto_ne.thermo_core import Coherent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta1", type=float, default=0.1)
    ap.add_argument("--beta2", type=float, default=0.05)
    args = ap.parse_args()
    b1, b2 = args.beta1, args.beta2
    print(f"{'phi':>8} {'eps':>8} {'err/eps^2':>12} {'inverted/eps^2':>15} {'eta_numeric':>14}")
    for phi in (0.0, math.pi / 3, 2 * math.pi / 3, math.pi):
        for eps in (1e-2, 3e-3, 1e-3, 3e-4):
            rep = maximize_power(PowerProblem(1.0, b1, b2, Coherent(eps, phi)))
            inv = emp_coherent(b1, b2, eps, phi, 1.0, printed=True)[0]
            print(f"{phi:8.4f} {eps:8.0e} {rep.discrepancy / eps**2:12.4f} "
                  f"{abs(rep.eta_at_max_power - inv) / eps**2:15.2f} {rep.eta_at_max_power:14.10f}")


if __name__ == "__main__":
    main()
