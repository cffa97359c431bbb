"""Scheduled vs every-frame range measurement on the benchmark scenario.

Runs the same seeds twice and prints the measurement savings next to the
range-error cost at each phase boundary.
"""

import argparse

import numpy as np

from msctrack.scheduler import SchedulerConfig
from msctrack.sim import MeasurementNoise, monte_carlo, paper_scenario


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threshold", type=float, default=5.0, help="sigma_r trigger [m]")
    args = ap.parse_args()

    sc = paper_scenario()
    noise = MeasurementNoise()
    sched = monte_carlo(
        sc,
        noise,
        None,
        SchedulerConfig(threshold_sigma_r=args.threshold),
        n_runs=args.runs,
        base_seed=args.seed,
    )
    # warmup spanning the whole run forces a range measurement every frame
    always = monte_carlo(
        sc,
        noise,
        None,
        SchedulerConfig(warmup_frames=sc.frame_count),
        n_runs=args.runs,
        base_seed=args.seed,
    )

    rate = float(np.mean([log.range_measured.mean() for log in sched.runs]))
    print(f"{args.runs} runs, {sc.frame_count} frames each, threshold {args.threshold} m")
    print(f"range measurement rate: scheduled {rate:.1%}, baseline 100.0%")
    print("RMS range error [m]:")
    for t_mark in (5.0, 12.0, 17.0, 25.0, 30.0, 39.9):
        k = min(int(t_mark / sc.ts), sc.frame_count - 1)
        print(
            f"  t = {t_mark:5.1f} s   scheduled {sched.rms_range_err[k]:7.2f}"
            f"   every-frame {always.rms_range_err[k]:7.2f}"
        )


if __name__ == "__main__":
    main()
