"""The six figure builders.

Each builder takes validated RunData and returns a matplotlib Figure;
the CLI owns file writing. Truth-derived display quantities (velocity,
turn rate, along-track acceleration, maneuver segmentation) come from
finite differences of the logged truth positions so rendering needs the
CSVs and nothing else.
"""

from __future__ import annotations

import numpy as np
from matplotlib.figure import Figure

from .io import RunData

FIGURE_IDS = (
    "traj3d",
    "components",
    "state_errors",
    "range_panel",
    "mixing",
    "turn_accel",
)

_STATE_PANELS = (
    ("omega", "rad/s"),
    ("thetadot", "rad/s"),
    ("tau", "1/s"),
    ("psi", "rad"),
    ("theta", "rad"),
    ("s", "1/m"),
)

# classification thresholds for truth segmentation; benchmark maneuvers
# sit one to two orders of magnitude past each
_TURN_RATE_MIN = 0.02  # rad/s
_ACCEL_MIN = 0.05  # m/s^2
_JERK_MIN = 1.0  # m/s^3
_SEGMENT_MIN_FRAMES = 30


def _truth_motion(run):
    """t, velocity, planar turn rate, and along-track acceleration."""
    t = run["t_s"].to_numpy()
    pos = run[["x_true", "y_true", "z_true"]].to_numpy()
    vel = np.gradient(pos, t, axis=0)
    heading = np.unwrap(np.arctan2(vel[:, 1], vel[:, 0]))
    turn_rate = np.gradient(heading, t)
    accel_along = np.gradient(np.hypot(vel[:, 0], vel[:, 1]), t)
    return t, vel, turn_rate, accel_along


def _est_position(run):
    r = 1.0 / run["s_est"].to_numpy()
    psi = run["psi_est"].to_numpy()
    theta = run["theta_est"].to_numpy()
    return np.column_stack(
        [
            r * np.cos(theta) * np.cos(psi),
            r * np.cos(theta) * np.sin(psi),
            r * np.sin(theta),
        ]
    )


def _maneuver_segments(run) -> list[tuple[int, int]]:
    """Frame ranges of the maneuver phases implied by the truth columns.

    Frames classify as turning, jerking, accelerating, or cruising from
    differenced truth motion; sub-second runs are differencing
    transients at phase handoffs and get absorbed into their
    predecessor.
    """
    t, _, turn_rate, accel_along = _truth_motion(run)
    jerk = np.gradient(accel_along, t)
    codes = np.where(
        np.abs(turn_rate) > _TURN_RATE_MIN,
        1,
        np.where(np.abs(jerk) > _JERK_MIN, 3, np.where(np.abs(accel_along) > _ACCEL_MIN, 2, 0)),
    )

    runs = []
    for k, code in enumerate(codes):
        if runs and runs[-1][0] == code:
            runs[-1][2] = k + 1
        else:
            runs.append([int(code), k, k + 1])
    merged: list[list[int]] = []
    for seg in runs:
        if merged and seg[2] - seg[1] < _SEGMENT_MIN_FRAMES:
            merged[-1][2] = seg[2]
        else:
            merged.append(seg)
    if len(merged) > 1 and merged[0][2] - merged[0][1] < _SEGMENT_MIN_FRAMES:
        merged[1][1] = merged[0][1]
        merged = merged[1:]
    final: list[list[int]] = []
    for seg in merged:
        if final and final[-1][0] == seg[0]:
            final[-1][2] = seg[2]
        else:
            final.append(seg)
    return [(seg[1], seg[2]) for seg in final]


def fig_traj3d(data: RunData) -> Figure:
    run = data.run
    pos = run[["x_true", "y_true", "z_true"]].to_numpy()
    fig = Figure(figsize=(7.0, 6.0))
    ax = fig.add_subplot(projection="3d")
    ax.plot(pos[:, 0], pos[:, 1], pos[:, 2], color="tab:blue")
    ax.scatter(*pos[0], color="tab:green", marker="o", label="start")
    for i, (start, stop) in enumerate(_maneuver_segments(run)):
        mid = pos[(start + stop) // 2]
        ax.text(mid[0], mid[1], mid[2], f"phase {i + 1}", fontsize=9)
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_zlabel("z [m]")
    ax.set_title("target trajectory")
    ax.legend(loc="upper left")
    return fig


def fig_components(data: RunData) -> Figure:
    run = data.run
    t = run["t_s"].to_numpy()
    truth = run[["x_true", "y_true", "z_true"]].to_numpy()
    est = _est_position(run)
    fig = Figure(figsize=(7.0, 7.0))
    axes = fig.subplots(3, 1, sharex=True)
    for i, (ax, label) in enumerate(zip(axes, ("x [m]", "y [m]", "z [m]"))):
        ax.plot(t, truth[:, i], color="tab:blue", label="truth")
        ax.plot(t, est[:, i], color="tab:orange", linestyle="--", label="estimate")
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    axes[0].legend(loc="best")
    axes[0].set_title("position components")
    axes[-1].set_xlabel("t [s]")
    fig.align_ylabels(axes)
    return fig


def fig_state_errors(data: RunData) -> Figure:
    run = data.run
    t = run["t_s"].to_numpy()
    fig = Figure(figsize=(10.0, 7.0))
    axes = fig.subplots(3, 2, sharex=True)
    for ax, (name, unit) in zip(axes.flat, _STATE_PANELS):
        err = run[f"err_{name}"].to_numpy()
        b3 = run[f"b3_{name}"].to_numpy()
        ax.plot(t, err, color="tab:blue", linewidth=0.9, label="error")
        ax.plot(t, b3, color="tab:red", linestyle=":", label="3-sigma bound")
        ax.plot(t, -b3, color="tab:red", linestyle=":")
        ax.set_ylabel(f"{name} [{unit}]")
        ax.grid(True, alpha=0.3)
    axes[0, 0].legend(loc="best", fontsize=8)
    for ax in axes[-1]:
        ax.set_xlabel("t [s]")
    fig.suptitle("state estimation errors with 3-sigma bounds")
    return fig


def fig_range_panel(data: RunData) -> Figure:
    run, summary = data.run, data.summary
    t = run["t_s"].to_numpy()
    r_true = np.linalg.norm(run[["x_true", "y_true", "z_true"]].to_numpy(), axis=1)
    r_est = 1.0 / run["s_est"].to_numpy()
    measured = run["range_measured"].to_numpy().astype(bool)
    sigma_r = run["sigma_r_m"].to_numpy()

    fig = Figure(figsize=(8.0, 8.0))
    axes = fig.subplots(3, 1, sharex=True)

    axes[0].plot(t, r_est, color="tab:orange", label="estimated range")
    axes[0].plot(
        t[measured],
        run["r_meas"].to_numpy()[measured],
        ".",
        color="tab:blue",
        markersize=2,
        label="range measurements",
    )
    axes[0].set_ylabel("range [m]")
    axes[0].legend(loc="best")

    axes[1].plot(t, r_est - r_true, color="tab:blue", linewidth=0.9, label="this run")
    axes[1].plot(
        summary["t_s"].to_numpy(),
        summary["rms_range_err_m"].to_numpy(),
        color="tab:red",
        label="batch RMS",
    )
    axes[1].set_ylabel("range error [m]")
    axes[1].legend(loc="best")

    finite = np.isfinite(sigma_r)
    axes[2].plot(t[finite], sigma_r[finite], color="tab:green", label="predicted sigma_r")
    pulses = axes[2].twinx()
    pulses.vlines(t[measured], 0.0, 1.0, color="tab:gray", alpha=0.25)
    pulses.set_ylim(0.0, 4.0)
    pulses.set_yticks([])
    axes[2].set_ylabel("sigma_r [m]")
    axes[2].set_xlabel("t [s]")
    axes[2].legend(loc="best")

    for ax in axes:
        ax.grid(True, alpha=0.3)
    fig.suptitle("range estimate, error, and scheduling pulses")
    return fig


def fig_mixing(data: RunData) -> Figure:
    run = data.run
    t = run["t_s"].to_numpy()
    fig = Figure(figsize=(8.0, 4.0))
    ax = fig.subplots()
    for column, label in (
        ("mu_ncv", "constant velocity"),
        ("mu_nca", "constant acceleration"),
        ("mu_ct", "coordinated turn"),
    ):
        ax.plot(t, run[column].to_numpy(), label=label)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("model probability")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    ax.set_title("mixing probabilities")
    return fig


def fig_turn_accel(data: RunData) -> Figure:
    run = data.run
    t, _, turn_rate, accel_along = _truth_motion(run)
    fig = Figure(figsize=(8.0, 6.0))
    axes = fig.subplots(2, 1, sharex=True)

    axes[0].plot(t, np.rad2deg(run["omega_T_est"].to_numpy()), color="tab:orange", label="estimate")
    axes[0].plot(t, np.rad2deg(turn_rate), color="tab:blue", linestyle="--", label="truth")
    axes[0].set_ylabel("turn rate [deg/s]")
    axes[0].legend(loc="best")

    axes[1].plot(t, accel_along, color="tab:blue", label="truth")
    axes[1].set_ylabel("along-track accel [m/s^2]")
    axes[1].set_xlabel("t [s]")
    axes[1].legend(loc="best")

    for ax in axes:
        ax.grid(True, alpha=0.3)
    fig.suptitle("turn rate and along-track acceleration")
    return fig


_BUILDERS = {
    "traj3d": fig_traj3d,
    "components": fig_components,
    "state_errors": fig_state_errors,
    "range_panel": fig_range_panel,
    "mixing": fig_mixing,
    "turn_accel": fig_turn_accel,
}


def build(figure_id: str, data: RunData) -> Figure:
    """Render one figure id to a Figure.

    Raises:
        ValueError: if the id is not one of FIGURE_IDS.
    """
    try:
        builder = _BUILDERS[figure_id]
    except KeyError:
        raise ValueError(
            f"unknown figure id {figure_id!r}; expected one of {', '.join(FIGURE_IDS)}"
        ) from None
    return builder(data)
