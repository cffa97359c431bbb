"""Command-line front end: validate configs, run batches, write CSVs.

Exit codes: 0 on success, 1 on config validation failure, 2 on runtime
failure (I/O or a filter blow-up mid-run).
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .dynamics import ProcessNoiseConfig
from .errors import ConfigInvalid, PhaseSumMismatch, TrackingError
from .imm import ImmConfig
from .scheduler import SchedulerConfig
from .sim import (
    FilterConfig,
    MeasurementNoise,
    Scenario,
    ScenarioPhase,
    monte_carlo,
    nees_band,
)
from .sim import PhaseKind
from .ukf import UtParams

_PHASE_KINDS = {k.value: k for k in PhaseKind}


@dataclass
class RunPlan:
    """Everything a run needs, built from one validated config tree."""

    scenario: Scenario
    noise: MeasurementNoise
    filter_cfg: FilterConfig
    scheduler_cfg: SchedulerConfig
    n_runs: int
    base_seed: int
    out_dir: Path


def load_config(name_or_path: str) -> dict:
    """Read a YAML config from a path, or from the bundled configs by name."""
    path = Path(name_or_path)
    if path.is_file():
        text = path.read_text()
    else:
        bundled = resources.files("msctrack") / "configs" / f"{name_or_path}.yaml"
        if not bundled.is_file():
            raise FileNotFoundError(
                f"no config file {name_or_path!r} and no bundled config of that name"
            )
        text = bundled.read_text()
    cfg = yaml.safe_load(text)
    if not isinstance(cfg, dict):
        raise ConfigInvalid([f"config root must be a mapping, got {type(cfg).__name__}"])
    return cfg


def _build_scenario(cfg: dict, violations: list[str]) -> Scenario | None:
    phases = []
    for i, p in enumerate(cfg.get("phases", [])):
        kind = _PHASE_KINDS.get(p.get("kind"))
        if kind is None:
            violations.append(f"scenario.phases[{i}].kind: unknown kind {p.get('kind')!r}")
            return None
        phases.append(
            ScenarioPhase(
                kind=kind,
                duration=float(p.get("duration_s", 0.0)),
                turn_rate=float(np.deg2rad(p.get("turn_rate_dps", 0.0))),
                accel=float(p.get("accel_mps2", 0.0)),
                jerk=float(p.get("jerk_mps3", 0.0)),
            )
        )
    try:
        return Scenario(
            phases=tuple(phases),
            ts=float(cfg.get("ts_s", 0.033)),
            initial_pos=tuple(cfg.get("initial_position_m", (-2000.0, 500.0, 700.0))),
            initial_vel=tuple(cfg.get("initial_velocity_mps", (200.0, 0.0, 50.0))),
            total_time=cfg.get("total_time_s"),
        )
    except PhaseSumMismatch as exc:
        violations.append(f"scenario: {exc}")
    except ConfigInvalid as exc:
        violations.extend(f"scenario: {v}" for v in exc.violations)
    return None


def build_plan(cfg: dict) -> tuple[RunPlan | None, list[str]]:
    """Construct all run objects, collecting every violation found."""
    violations: list[str] = []

    scenario = _build_scenario(cfg.get("scenario", {}), violations)

    noise_cfg = cfg.get("noise", {})
    noise = None
    try:
        noise = MeasurementNoise(
            sigma_psi=float(np.deg2rad(noise_cfg.get("sigma_psi_deg", 0.02))),
            sigma_theta=float(np.deg2rad(noise_cfg.get("sigma_theta_deg", 0.02))),
            sigma_r=float(noise_cfg.get("sigma_r_m", 3.0)),
        )
    except ConfigInvalid as exc:
        violations.extend(f"noise: {v}" for v in exc.violations)

    f_cfg = cfg.get("filter", {})
    filter_cfg = None
    try:
        ut_cfg = f_cfg.get("ut", {})
        pn_cfg = f_cfg.get("process_noise", {})
        imm_kwargs = {}
        if "markov" in f_cfg:
            imm_kwargs["markov"] = np.asarray(f_cfg["markov"], dtype=float)
        if "mu0" in f_cfg:
            imm_kwargs["mu0"] = np.asarray(f_cfg["mu0"], dtype=float)
        imm = ImmConfig(
            ut=UtParams(
                alpha=float(ut_cfg.get("alpha", 1e-3)),
                kappa=float(ut_cfg.get("kappa", 0.0)),
            ),
            process_noise=ProcessNoiseConfig(
                sigma_accel=float(pn_cfg.get("sigma_accel_mps2", 2.0)),
                sigma_jerk=float(pn_cfg.get("sigma_jerk_mps3", 15.0)),
                q_turn=float(pn_cfg.get("q_turn_radps2", 0.05)),
            ),
            sigma_psi=noise.sigma_psi if noise else np.deg2rad(0.02),
            sigma_theta=noise.sigma_theta if noise else np.deg2rad(0.02),
            sigma_r=noise.sigma_r if noise else 3.0,
            **imm_kwargs,
        )
        filter_cfg = FilterConfig(imm=imm)
    except ConfigInvalid as exc:
        violations.extend(f"filter: {v}" for v in exc.violations)

    s_cfg = cfg.get("scheduler", {})
    scheduler_cfg = None
    try:
        scheduler_cfg = SchedulerConfig(
            threshold_sigma_r=float(s_cfg.get("threshold_sigma_r_m", 5.0)),
            warmup_frames=int(s_cfg.get("warmup_frames", 50)),
            ut_params=filter_cfg.imm.ut if filter_cfg else UtParams(),
        )
    except ConfigInvalid as exc:
        violations.extend(f"scheduler: {v}" for v in exc.violations)

    mc_cfg = cfg.get("monte_carlo", {})
    n_runs = int(mc_cfg.get("n_runs", 1))
    base_seed = int(mc_cfg.get("base_seed", 0))
    if n_runs < 1:
        violations.append(f"monte_carlo.n_runs: must be >= 1, got {n_runs}")

    if violations or scenario is None or noise is None or filter_cfg is None or scheduler_cfg is None:
        return None, violations
    plan = RunPlan(
        scenario=scenario,
        noise=noise,
        filter_cfg=filter_cfg,
        scheduler_cfg=scheduler_cfg,
        n_runs=n_runs,
        base_seed=base_seed,
        out_dir=Path(cfg.get("output_dir", "runs/out")),
    )
    return plan, []


def _apply_overrides(plan: RunPlan, args: argparse.Namespace) -> RunPlan:
    if args.runs is not None:
        plan.n_runs = args.runs
    if args.seed is not None:
        plan.base_seed = args.seed
    if args.out is not None:
        plan.out_dir = Path(args.out)
    if args.threshold is not None:
        plan.scheduler_cfg = SchedulerConfig(
            threshold_sigma_r=args.threshold,
            warmup_frames=plan.scheduler_cfg.warmup_frames,
            ut_params=plan.scheduler_cfg.ut_params,
        )
    if args.no_schedule:
        # Regular range measurement on every frame, for A/B comparison.
        plan.scheduler_cfg = SchedulerConfig(
            threshold_sigma_r=plan.scheduler_cfg.threshold_sigma_r,
            warmup_frames=plan.scenario.frame_count,
            ut_params=plan.scheduler_cfg.ut_params,
        )
    return plan


def cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = load_config(args.config)
    except (OSError, ConfigInvalid, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    plan, violations = build_plan(cfg)
    if plan is None:
        for v in violations:
            print(f"invalid: {v}", file=sys.stderr)
        return 1
    plan = _apply_overrides(plan, args)
    if plan.n_runs < 1:
        print("invalid: --runs must be >= 1", file=sys.stderr)
        return 1

    try:
        result = monte_carlo(
            plan.scenario,
            plan.noise,
            plan.filter_cfg,
            plan.scheduler_cfg,
            n_runs=plan.n_runs,
            base_seed=plan.base_seed,
        )
        plan.out_dir.mkdir(parents=True, exist_ok=True)
        for log in result.runs:
            log.write_csv(plan.out_dir / f"run_{log.seed}.csv")
        result.write_summary_csv(plan.out_dir / "summary.csv")
    except (TrackingError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2

    lo, hi = nees_band(plan.n_runs)
    in_band = (result.mean_nees >= lo) & (result.mean_nees <= hi)
    with warnings.catch_warnings():
        # all-warmup runs leave every phase slice empty
        warnings.simplefilter("ignore", RuntimeWarning)
        mean_rates = np.nanmean(result.phase_rates, axis=0)
    rate_strs = [
        f"phase {p + 1}: {r:.3f}" if np.isfinite(r) else f"phase {p + 1}: n/a"
        for p, r in enumerate(mean_rates)
    ]
    print(f"runs: {plan.n_runs} (seeds {plan.base_seed}..{plan.base_seed + plan.n_runs - 1})")
    print(f"frames per run: {plan.scenario.frame_count}")
    print(f"final RMS range error: {result.rms_range_err[-1]:.2f} m")
    print(f"mean scheduling rate, warmup excluded ({'; '.join(rate_strs)})")
    print(f"NEES within [{lo:.2f}, {hi:.2f}] for {in_band.mean() * 100:.1f}% of frames")
    print(f"wrote {plan.n_runs} run CSV(s) and summary.csv to {plan.out_dir}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        cfg = load_config(args.config)
    except (OSError, ConfigInvalid, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    plan, violations = build_plan(cfg)
    if plan is None:
        for v in violations:
            print(f"invalid: {v}")
        return 1
    print("config valid")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="msctrack",
        description="Maneuvering-target tracking runs with scheduled range measurements",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a (Monte-Carlo) tracking batch")
    run_p.add_argument("--config", default="paper_scenario", help="config path or bundled name")
    run_p.add_argument("--runs", type=int, default=None, help="override number of runs")
    run_p.add_argument("--seed", type=int, default=None, help="override base seed")
    run_p.add_argument("--out", default=None, help="override output directory")
    run_p.add_argument("--threshold", type=float, default=None, help="override sigma_r threshold [m]")
    run_p.add_argument(
        "--no-schedule",
        action="store_true",
        help="measure range every frame instead of scheduling",
    )
    run_p.set_defaults(func=cmd_run)

    val_p = sub.add_parser("validate", help="check a config without running")
    val_p.add_argument("--config", default="paper_scenario", help="config path or bundled name")
    val_p.set_defaults(func=cmd_validate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
