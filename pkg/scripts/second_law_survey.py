"""Run the seeded invariant battery for both envelopes and print a one-line summary per check."""
import argparse

from otto_ne.validation import CHECKS, run_battery


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    for env in ("high_t", "out_of_regime"):
        rep = run_battery(args.samples, args.seed, env, jobs=args.jobs)
        print(f"== {env}: all_passed={rep['all_passed']} regime_warnings={rep['regime_warnings']} "
              f"physics_errors={len(rep['physics_errors'])}")
        for name in CHECKS:
            c = rep["checks"][name]
            wm = "n/a" if c["worst_margin"] is None else f"{c['worst_margin']:.3e}"
            print(f"  {name:28s} pass={c['passed']:5d} fail={c['failed']:3d} skip={c['skipped']:5d} worst={wm}")


if __name__ == "__main__":
    main()
