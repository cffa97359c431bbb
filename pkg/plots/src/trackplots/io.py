"""Run-directory CSV loading and schema validation.

A run directory holds one or more per-run logs named run_<seed>.csv plus
a batch summary.csv; figures render from the lowest-seed run and the
summary. This package never computes estimates itself, it only displays
what the CSVs contain.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import pandas as pd

from .errors import SchemaMismatch

RUN_COLUMNS = (
    "frame",
    "t_s",
    "x_true",
    "y_true",
    "z_true",
    "psi_meas",
    "theta_meas",
    "r_meas",
    "range_measured",
    "sigma_r_m",
    "mu_ncv",
    "mu_nca",
    "mu_ct",
    "omega_est",
    "thetadot_est",
    "tau_est",
    "psi_est",
    "theta_est",
    "s_est",
    "err_omega",
    "err_thetadot",
    "err_tau",
    "err_psi",
    "err_theta",
    "err_s",
    "b3_omega",
    "b3_thetadot",
    "b3_tau",
    "b3_psi",
    "b3_theta",
    "b3_s",
    "omega_T_est",
    "nees",
)
SUMMARY_COLUMNS = ("frame", "t_s", "rms_range_err_m", "mean_nees", "sched_rate")


@dataclass(frozen=True)
class RunData:
    """One run's frames plus the batch summary, already validated."""

    run: pd.DataFrame
    summary: pd.DataFrame
    run_path: Path
    summary_path: Path


def _read_checked(path: Path, required) -> pd.DataFrame:
    try:
        df = pd.read_csv(path)
    except pd.errors.EmptyDataError as exc:
        raise SchemaMismatch(f"{path.name}: empty CSV") from exc
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise SchemaMismatch(f"{path.name} missing columns: {', '.join(missing)}")
    return df


def find_run_csv(in_dir) -> Path:
    """Path of the lowest-seed run_<seed>.csv in the directory."""
    candidates = []
    for p in Path(in_dir).glob("run_*.csv"):
        m = re.fullmatch(r"run_(\d+)\.csv", p.name)
        if m:
            candidates.append((int(m.group(1)), p))
    if not candidates:
        raise FileNotFoundError(f"no run_<seed>.csv files in {in_dir}")
    return min(candidates)[1]


def load_run_dir(in_dir) -> RunData:
    in_dir = Path(in_dir)
    run_path = find_run_csv(in_dir)
    summary_path = in_dir / "summary.csv"
    if not summary_path.is_file():
        raise FileNotFoundError(f"no summary.csv in {in_dir}")
    return RunData(
        run=_read_checked(run_path, RUN_COLUMNS),
        summary=_read_checked(summary_path, SUMMARY_COLUMNS),
        run_path=run_path,
        summary_path=summary_path,
    )
