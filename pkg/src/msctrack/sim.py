"""Scenario truth generation, measurement synthesis, and tracking runs.

The benchmark trajectory is a six-phase maneuver sampled at the optical
frame interval; each phase integrates in closed form so truth carries no
numerical integration error. Single runs log everything needed for the
output CSV; the Monte-Carlo harness aggregates RMS/NEES/scheduling
statistics across independently seeded runs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .coords import cart_kinematics_to_msc, cart_to_spherical, wrap_angle
from .errors import ConfigInvalid, PhaseSumMismatch, TrackingError
from .imm import MODEL_ORDER, ImmBank, ImmConfig, combine, step
from .scheduler import ScheduleDecision, SchedulerConfig, decide, range_sigma
from .state import CORE_DIM, IDX_PSI, IDX_S, ModelId, MscState
from .ukf import GaussianEstimate, Measurement


class PhaseKind(Enum):
    CONST_VEL = "const_vel"
    CONST_TURN = "const_turn"
    CONST_BODY_ACCEL = "const_body_accel"
    CONST_BODY_JERK = "const_body_jerk"


@dataclass(frozen=True)
class ScenarioPhase:
    """One maneuver segment; only the parameter its kind uses is read."""

    kind: PhaseKind
    duration: float
    turn_rate: float = 0.0  # rad/s, x-y plane
    accel: float = 0.0  # m/s^2 along the horizontal velocity direction
    jerk: float = 0.0  # m/s^3 along the horizontal velocity direction


@dataclass(frozen=True)
class Scenario:
    """Phase list plus initial kinematics and the frame interval."""

    phases: tuple[ScenarioPhase, ...]
    ts: float = 0.033
    initial_pos: tuple[float, float, float] = (-2000.0, 500.0, 700.0)
    initial_vel: tuple[float, float, float] = (200.0, 0.0, 50.0)
    total_time: float | None = None

    def __post_init__(self) -> None:
        bad = []
        if self.ts <= 0:
            bad.append(f"ts must be > 0, got {self.ts}")
        if not self.phases:
            bad.append("at least one phase is required")
        if any(p.duration <= 0 for p in self.phases):
            bad.append("phase durations must be > 0")
        if bad:
            raise ConfigInvalid(bad)
        if self.total_time is not None:
            total = sum(p.duration for p in self.phases)
            if abs(total - self.total_time) > 1e-9:
                raise PhaseSumMismatch(
                    f"phase durations sum to {total}, expected {self.total_time}"
                )

    @property
    def duration(self) -> float:
        return sum(p.duration for p in self.phases)

    @property
    def frame_count(self) -> int:
        # Guard against 40/0.033 style float edges landing just above an integer.
        return math.ceil(self.duration / self.ts - 1e-9)

    def phase_index(self, t: float) -> int:
        """Index of the phase containing time t (end boundaries exclusive)."""
        start = 0.0
        for i, p in enumerate(self.phases):
            start += p.duration
            if t < start:
                return i
        return len(self.phases) - 1


def paper_scenario(ts: float = 0.033) -> Scenario:
    """The benchmark 40 s six-phase engagement."""
    return Scenario(
        phases=(
            ScenarioPhase(PhaseKind.CONST_VEL, 5.0),
            ScenarioPhase(PhaseKind.CONST_TURN, 7.0, turn_rate=np.deg2rad(18.0)),
            ScenarioPhase(PhaseKind.CONST_VEL, 5.0),
            ScenarioPhase(PhaseKind.CONST_TURN, 8.0, turn_rate=np.deg2rad(-22.5)),
            ScenarioPhase(PhaseKind.CONST_BODY_ACCEL, 5.0, accel=0.3),
            ScenarioPhase(PhaseKind.CONST_BODY_JERK, 10.0, jerk=10.0),
        ),
        ts=ts,
        total_time=40.0,
    )


@dataclass(frozen=True)
class TruthSample:
    t: float
    pos: np.ndarray
    vel: np.ndarray
    acc: np.ndarray
    turn_rate: float


def truth_trajectory(scenario: Scenario, ts: float | None = None) -> list[TruthSample]:
    """Closed-form truth at every frame time k*ts.

    The vertical velocity never changes; turns rotate the horizontal
    velocity at the stated rate, and body-axis accel/jerk phases grow
    the horizontal speed along the (then-fixed) velocity direction. The
    longitudinal acceleration carries over into a jerk phase so the
    speed profile stays smooth.
    """
    ts = scenario.ts if ts is None else ts
    n_frames = (
        scenario.frame_count
        if ts == scenario.ts
        else math.ceil(scenario.duration / ts - 1e-9)
    )

    samples: list[TruthSample] = []
    # State at the start of the current phase.
    pos0 = np.array(scenario.initial_pos, dtype=float)
    vh0 = np.array(scenario.initial_vel[:2], dtype=float)
    vz = float(scenario.initial_vel[2])
    a_long = 0.0  # longitudinal acceleration carried across phases
    phase_start = 0.0
    phase_iter = iter(scenario.phases)
    phase = next(phase_iter)

    def eval_phase(dt: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
        """Position/velocity/acceleration dt seconds into the current phase."""
        if phase.kind is PhaseKind.CONST_TURN:
            w = phase.turn_rate
            sin_wt, cos_wt = math.sin(w * dt), math.cos(w * dt)
            vx0, vy0 = vh0
            vh = np.array([vx0 * cos_wt - vy0 * sin_wt, vx0 * sin_wt + vy0 * cos_wt])
            dx = (vx0 * sin_wt + vy0 * (cos_wt - 1.0)) / w
            dy = (vx0 * (1.0 - cos_wt) + vy0 * sin_wt) / w
            acc = np.array([-w * vh[1], w * vh[0], 0.0])
            offset = np.array([dx, dy, vz * dt])
        else:
            speed0 = float(np.hypot(*vh0))
            u = vh0 / speed0
            if phase.kind is PhaseKind.CONST_VEL:
                a0, j = 0.0, 0.0
            elif phase.kind is PhaseKind.CONST_BODY_ACCEL:
                a0, j = phase.accel, 0.0
            else:
                a0, j = a_long, phase.jerk
            along = speed0 * dt + 0.5 * a0 * dt * dt + j * dt**3 / 6.0
            speed = speed0 + a0 * dt + 0.5 * j * dt * dt
            vh = u * speed
            acc = np.append(u * (a0 + j * dt), 0.0)
            offset = np.array([u[0] * along, u[1] * along, vz * dt])
        pos = pos0 + offset
        vel = np.array([vh[0], vh[1], vz])
        rate = phase.turn_rate if phase.kind is PhaseKind.CONST_TURN else 0.0
        return pos, vel, acc, rate

    for k in range(n_frames):
        t = k * ts
        # Advance the phase-start state over any boundaries passed.
        while t - phase_start > phase.duration - 1e-12:
            end_pos, end_vel, _, _ = eval_phase(phase.duration)
            pos0 = end_pos
            vh0 = end_vel[:2]
            if phase.kind is PhaseKind.CONST_BODY_ACCEL:
                a_long = phase.accel
            elif phase.kind is PhaseKind.CONST_BODY_JERK:
                a_long = a_long + phase.jerk * phase.duration
            elif phase.kind is PhaseKind.CONST_TURN:
                a_long = 0.0
            phase_start += phase.duration
            phase = next(phase_iter)
        pos, vel, acc, rate = eval_phase(t - phase_start)
        samples.append(TruthSample(t=t, pos=pos, vel=vel, acc=acc, turn_rate=rate))
    return samples


@dataclass(frozen=True)
class MeasurementNoise:
    """Sensor noise standard deviations (radians / meters)."""

    sigma_psi: float = np.deg2rad(0.02)
    sigma_theta: float = np.deg2rad(0.02)
    sigma_r: float = 3.0
    seed: int = 0

    def __post_init__(self) -> None:
        bad = [
            f"{name} must be >= 0"
            for name in ("sigma_psi", "sigma_theta", "sigma_r")
            if getattr(self, name) < 0
        ]
        if bad:
            raise ConfigInvalid(bad)


def synthesize_measurement(
    truth: TruthSample,
    noise: MeasurementNoise,
    include_range: bool,
    rng: np.random.Generator,
) -> Measurement:
    """Noisy spherical measurement of a truth sample.

    Three normal deviates are drawn per call whether or not range is
    included, so the angle-noise stream does not depend on the schedule.
    """
    sp = cart_to_spherical(truth.pos)
    n = rng.standard_normal(3)
    psi = wrap_angle(sp.psi + noise.sigma_psi * n[0])
    theta = sp.theta + noise.sigma_theta * n[1]
    r = sp.r + noise.sigma_r * n[2] if include_range else None
    return Measurement(psi=psi, theta=theta, r=r)


@dataclass(frozen=True)
class InitConfig:
    """First-frame initialization priors, all tunable."""

    omega_std: float = 0.1  # rad/s
    thetadot_std: float = 0.1  # rad/s
    tau_std: float = 0.2  # 1/s
    fallback_range: float = 2000.0  # m, used when no range at frame 0
    fallback_range_std: float = 1000.0  # m
    extras_sigma_scale: float = 5.0  # sigma-state std = scale * s
    omega_t_std: float = 0.5  # rad/s


@dataclass
class FilterConfig:
    """Bank composition plus shared filter settings."""

    imm: ImmConfig = field(default_factory=ImmConfig)
    init: InitConfig = field(default_factory=InitConfig)
    models: tuple[ModelId, ...] = MODEL_ORDER

    def __post_init__(self) -> None:
        if len(self.models) != self.imm.mu0.shape[0]:
            raise ConfigInvalid(
                [f"{len(self.models)} models but mu0 has {self.imm.mu0.shape[0]} entries"]
            )


def initial_estimates(z0: Measurement, cfg: FilterConfig) -> list[GaussianEstimate]:
    """Per-model estimates from the first measurement.

    Angles come straight from the measurement, rates start at zero, and
    s comes from the measured range (or the configured fallback guess).
    The s-variance maps range uncertainty through s = 1/r to first
    order: sigma_s = sigma_r * s^2.
    """
    init = cfg.init
    if z0.r is not None:
        r0, sigma_r = z0.r, cfg.imm.sigma_r
    else:
        r0, sigma_r = init.fallback_range, init.fallback_range_std
    s0 = 1.0 / r0
    core = np.array([0.0, 0.0, 0.0, z0.psi, z0.theta, s0])
    core_var = np.array(
        [
            init.omega_std**2,
            init.thetadot_std**2,
            init.tau_std**2,
            cfg.imm.sigma_psi**2,
            cfg.imm.sigma_theta**2,
            (sigma_r * s0 * s0) ** 2,
        ]
    )
    estimates = []
    for model in cfg.models:
        values = np.zeros(model.dim)
        values[:CORE_DIM] = core
        var = np.zeros(model.dim)
        var[:CORE_DIM] = core_var
        if model is ModelId.NCA:
            var[CORE_DIM:] = (init.extras_sigma_scale * s0) ** 2
        elif model is ModelId.CT:
            var[CORE_DIM] = init.omega_t_std**2
        estimates.append(GaussianEstimate(MscState(model, values), np.diag(var)))
    return estimates


@dataclass
class RunLog:
    """Per-frame record of one tracking run (arrays indexed by frame)."""

    seed: int
    t: np.ndarray
    pos_true: np.ndarray  # (n, 3)
    msc_true: np.ndarray  # (n, 6) core truth
    psi_meas: np.ndarray
    theta_meas: np.ndarray
    r_meas: np.ndarray  # nan where range not measured
    range_measured: np.ndarray  # int 0/1
    sigma_r: np.ndarray
    mu: np.ndarray  # (n, 3) in NCV/NCA/CT column order
    est: np.ndarray  # (n, 6) combined core mean
    err: np.ndarray  # (n, 6) est - truth, psi wrapped
    b3: np.ndarray  # (n, 6) 3*sqrt(diag of combined cov)
    omega_t_est: np.ndarray
    nees: np.ndarray

    COLUMNS = (
        "frame,t_s,x_true,y_true,z_true,psi_meas,theta_meas,r_meas,"
        "range_measured,sigma_r_m,mu_ncv,mu_nca,mu_ct,"
        "omega_est,thetadot_est,tau_est,psi_est,theta_est,s_est,"
        "err_omega,err_thetadot,err_tau,err_psi,err_theta,err_s,"
        "b3_omega,b3_thetadot,b3_tau,b3_psi,b3_theta,b3_s,"
        "omega_T_est,nees"
    )

    @property
    def range_err(self) -> np.ndarray:
        """Range estimation error 1/s_est - r_true per frame."""
        r_true = np.linalg.norm(self.pos_true, axis=1)
        return 1.0 / self.est[:, IDX_S] - r_true

    def write_csv(self, path) -> None:
        """Write the per-frame log; floats via repr for byte determinism."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.COLUMNS.split(","))
            for k in range(self.t.size):
                row = [
                    str(k),
                    repr(float(self.t[k])),
                    *(repr(float(v)) for v in self.pos_true[k]),
                    repr(float(self.psi_meas[k])),
                    repr(float(self.theta_meas[k])),
                    "" if np.isnan(self.r_meas[k]) else repr(float(self.r_meas[k])),
                    str(int(self.range_measured[k])),
                    repr(float(self.sigma_r[k])),
                    *(repr(float(v)) for v in self.mu[k]),
                    *(repr(float(v)) for v in self.est[k]),
                    *(repr(float(v)) for v in self.err[k]),
                    *(repr(float(v)) for v in self.b3[k]),
                    repr(float(self.omega_t_est[k])),
                    repr(float(self.nees[k])),
                ]
                writer.writerow(row)


_MU_COLUMN_ORDER = (ModelId.NCV, ModelId.NCA, ModelId.CT)


def run_track(
    scenario: Scenario,
    noise: MeasurementNoise,
    filter_cfg: FilterConfig | None = None,
    scheduler_cfg: SchedulerConfig | None = None,
    seed: int | None = None,
) -> RunLog:
    """One full tracking run over the scenario.

    Frame 0 initializes the bank from the first measurement (with range
    iff the scheduler has warmup); every later frame runs schedule ->
    measure -> IMM step. Filter errors are re-raised with the frame
    index attached.
    """
    filter_cfg = filter_cfg or FilterConfig()
    scheduler_cfg = scheduler_cfg or SchedulerConfig()
    seed = noise.seed if seed is None else seed
    rng = np.random.default_rng(seed)

    truth = truth_trajectory(scenario)
    n = len(truth)
    log = RunLog(
        seed=seed,
        t=np.array([s.t for s in truth]),
        pos_true=np.stack([s.pos for s in truth]),
        msc_true=np.empty((n, CORE_DIM)),
        psi_meas=np.empty(n),
        theta_meas=np.empty(n),
        r_meas=np.full(n, np.nan),
        range_measured=np.zeros(n, dtype=int),
        sigma_r=np.empty(n),
        mu=np.zeros((n, 3)),
        est=np.empty((n, CORE_DIM)),
        err=np.empty((n, CORE_DIM)),
        b3=np.empty((n, CORE_DIM)),
        omega_t_est=np.full(n, np.nan),
        nees=np.empty(n),
    )
    for k, s in enumerate(truth):
        log.msc_true[k] = cart_kinematics_to_msc(s.pos, s.vel, ModelId.NCV).values

    bank: ImmBank | None = None
    combined: GaussianEstimate | None = None
    for k in range(n):
        try:
            if bank is None:
                measure = scheduler_cfg.warmup_frames > 0
                z = synthesize_measurement(truth[k], noise, measure, rng)
                bank = ImmBank(
                    filters=initial_estimates(z, filter_cfg),
                    mu=filter_cfg.imm.mu0.copy(),
                    config=filter_cfg.imm,
                )
                combined = combine(bank)
                # Informative only: the decision at frame 0 is the warmup rule.
                s_hat = combined.mean.values[IDX_S]
                try:
                    _, sig = range_sigma(s_hat, combined.cov[IDX_S, IDX_S], filter_cfg.imm.ut)
                except TrackingError:
                    sig = math.inf
                decision = ScheduleDecision(measure, sig, 1.0 / s_hat)
            else:
                s_hat = combined.mean.values[IDX_S]
                decision = decide(scheduler_cfg, k, s_hat, combined.cov[IDX_S, IDX_S])
                z = synthesize_measurement(truth[k], noise, decision.measure_range, rng)
                bank, combined = step(bank, z, scenario.ts)
        except TrackingError as exc:
            exc.args = (f"frame {k}: {exc}",)
            raise

        log.psi_meas[k] = z.psi
        log.theta_meas[k] = z.theta
        if z.r is not None:
            log.r_meas[k] = z.r
        log.range_measured[k] = int(decision.measure_range)
        log.sigma_r[k] = decision.sigma_r
        for est, mu_i in zip(bank.filters, bank.mu):
            col = _MU_COLUMN_ORDER.index(est.mean.model)
            log.mu[k, col] = mu_i
            if est.mean.model is ModelId.CT:
                log.omega_t_est[k] = est.mean.values[CORE_DIM]
        log.est[k] = combined.mean.values
        err = combined.mean.values - log.msc_true[k]
        err[IDX_PSI] = wrap_angle(err[IDX_PSI])
        log.err[k] = err
        log.b3[k] = 3.0 * np.sqrt(np.maximum(np.diag(combined.cov), 0.0))
        log.nees[k] = float(err @ np.linalg.solve(combined.cov, err))
    return log


@dataclass
class MonteCarloResult:
    """Aggregate statistics over a batch of runs."""

    runs: list[RunLog]
    t: np.ndarray
    rms_range_err: np.ndarray
    mean_nees: np.ndarray
    sched_rate: np.ndarray
    phase_rates: np.ndarray  # (n_runs, n_phases), warmup frames excluded

    def write_summary_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["frame", "t_s", "rms_range_err_m", "mean_nees", "sched_rate"])
            for k in range(self.t.size):
                writer.writerow(
                    [
                        str(k),
                        repr(float(self.t[k])),
                        repr(float(self.rms_range_err[k])),
                        repr(float(self.mean_nees[k])),
                        repr(float(self.sched_rate[k])),
                    ]
                )


def nees_band(n_runs: int, dim: int = CORE_DIM, conf: float = 0.95) -> tuple[float, float]:
    """Two-sided chi-square acceptance band for run-averaged NEES."""
    from scipy.stats import chi2

    alpha = (1.0 - conf) / 2.0
    dof = n_runs * dim
    return chi2.ppf(alpha, dof) / n_runs, chi2.ppf(1.0 - alpha, dof) / n_runs


def monte_carlo(
    scenario: Scenario,
    noise: MeasurementNoise,
    filter_cfg: FilterConfig | None = None,
    scheduler_cfg: SchedulerConfig | None = None,
    n_runs: int = 25,
    base_seed: int = 0,
) -> MonteCarloResult:
    """Independent runs with seeds base_seed..base_seed+n_runs-1.

    Per-phase scheduling rates exclude the warmup frames, where range
    measurement is forced and says nothing about the criterion.
    """
    scheduler_cfg = scheduler_cfg or SchedulerConfig()
    runs = [
        run_track(scenario, noise, filter_cfg, scheduler_cfg, seed=base_seed + i)
        for i in range(n_runs)
    ]
    t = runs[0].t
    range_errs = np.stack([log.range_err for log in runs])
    nees = np.stack([log.nees for log in runs])
    measured = np.stack([log.range_measured for log in runs])

    phase_of_frame = np.array([scenario.phase_index(tk) for tk in t])
    in_warmup = np.arange(t.size) < scheduler_cfg.warmup_frames
    n_phases = len(scenario.phases)
    phase_rates = np.full((n_runs, n_phases), np.nan)
    for p in range(n_phases):
        mask = (phase_of_frame == p) & ~in_warmup
        if mask.any():
            phase_rates[:, p] = measured[:, mask].mean(axis=1)

    return MonteCarloResult(
        runs=runs,
        t=t,
        rms_range_err=np.sqrt((range_errs**2).mean(axis=0)),
        mean_nees=nees.mean(axis=0),
        sched_rate=measured.mean(axis=0),
        phase_rates=phase_rates,
    )
