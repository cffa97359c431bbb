"""Shared fixtures: a synthetic run directory and a real benchmark one."""

import shutil
import subprocess

import numpy as np
import pandas as pd
import pytest

from trackplots.io import RUN_COLUMNS


def make_run_frame(n=100, ts=0.1, nees=6.0):
    """A schema-complete per-run log for a straight-line engagement."""
    t = np.arange(n) * ts
    pos = np.array([-2000.0, 500.0, 700.0]) + np.array([200.0, 0.0, 50.0]) * t[:, None]
    r = np.linalg.norm(pos, axis=1)
    psi = np.arctan2(pos[:, 1], pos[:, 0])
    theta = np.arcsin(pos[:, 2] / r)
    measured = (np.arange(n) % 2 == 0).astype(int)
    frame = {
        "frame": np.arange(n),
        "t_s": t,
        "x_true": pos[:, 0],
        "y_true": pos[:, 1],
        "z_true": pos[:, 2],
        "psi_meas": psi,
        "theta_meas": theta,
        "r_meas": np.where(measured, r, np.nan),
        "range_measured": measured,
        "sigma_r_m": np.full(n, 3.0),
        "mu_ncv": np.full(n, 0.5),
        "mu_nca": np.full(n, 0.3),
        "mu_ct": np.full(n, 0.2),
        "omega_est": np.full(n, 0.01),
        "thetadot_est": np.full(n, 0.02),
        "tau_est": np.full(n, -0.05),
        "psi_est": psi,
        "theta_est": theta,
        "s_est": 1.0 / r,
        "omega_T_est": np.full(n, 0.1),
        "nees": np.full(n, nees),
    }
    for name in ("omega", "thetadot", "tau", "psi", "theta", "s"):
        frame[f"err_{name}"] = 1e-3 * np.sin(t + len(frame))
        frame[f"b3_{name}"] = np.full(n, 0.01)
    return pd.DataFrame(frame)[list(RUN_COLUMNS)]


def make_summary_frame(n=100, ts=0.1):
    return pd.DataFrame(
        {
            "frame": np.arange(n),
            "t_s": np.arange(n) * ts,
            "rms_range_err_m": np.full(n, 1.0),
            "mean_nees": np.full(n, 6.0),
            "sched_rate": np.full(n, 0.5),
        }
    )


@pytest.fixture
def run_frame():
    return make_run_frame


@pytest.fixture
def summary_frame():
    return make_summary_frame


@pytest.fixture
def run_dir(tmp_path):
    make_run_frame(nees=6.0).to_csv(tmp_path / "run_2.csv", index=False)
    make_run_frame(nees=60.0).to_csv(tmp_path / "run_10.csv", index=False)
    make_summary_frame().to_csv(tmp_path / "summary.csv", index=False)
    return tmp_path


@pytest.fixture(scope="session")
def paper_run_dir(tmp_path_factory):
    """A real single-run benchmark directory produced by the tracking CLI."""
    exe = shutil.which("msctrack")
    if exe is None:
        raise RuntimeError("msctrack CLI not on PATH; install the tracking package first")
    out = tmp_path_factory.mktemp("paper_run")
    subprocess.run(
        [exe, "run", "--config", "paper_scenario", "--runs", "1", "--seed", "0", "--out", str(out)],
        check=True,
        capture_output=True,
        text=True,
    )
    return out


@pytest.fixture
def report(capfd):
    """Verdict printer that sidesteps output capture, then asserts."""

    def _report(name: str, ok: bool, detail: str) -> None:
        verdict = "PASS" if ok else "FAIL"
        with capfd.disabled():
            print(f"[{verdict}] {name}: {detail}", flush=True)
        assert ok, f"{name}: {detail}"

    return _report
