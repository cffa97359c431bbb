"""Per-phase filter consistency table for a benchmark batch.

Prints the run-averaged NEES by maneuver phase against the 95%
chi-square band, the view behind the consistency acceptance check.
"""

import argparse

import numpy as np

from msctrack.sim import MeasurementNoise, monte_carlo, nees_band, paper_scenario


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=25)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    sc = paper_scenario()
    mc = monte_carlo(sc, MeasurementNoise(), n_runs=args.runs, base_seed=args.seed)
    lo, hi = nees_band(args.runs)
    phase = np.array([sc.phase_index(t) for t in mc.t])

    print(f"{args.runs}-run mean NEES, 95% band [{lo:.3f}, {hi:.3f}]")
    for p, ph in enumerate(sc.phases):
        nees = mc.mean_nees[phase == p]
        in_band = float(((nees >= lo) & (nees <= hi)).mean())
        print(
            f"  phase {p + 1} ({ph.kind.value:16s}) "
            f"mean {nees.mean():5.2f}   in-band {in_band:6.1%}"
        )
    considered = (mc.t >= 2.0) & (mc.t < 30.0)
    in_band = ((mc.mean_nees >= lo) & (mc.mean_nees <= hi))[considered]
    print(f"settled, pre-jerk frames (t in [2, 30) s): in-band {in_band.mean():.1%}")


if __name__ == "__main__":
    main()
