"""End-to-end acceptance checks, one printed verdict line per check.

Each test pins one advertised property of the toolkit at a fixed
tolerance and prints a PASS/FAIL line (bypassing capture) so a plain
pytest run leaves a readable scorecard. Slow shared work (the 25-run
batch) is computed once per session.
"""

import decimal
import filecmp
import math
import time

import numpy as np
import pytest
from scipy.linalg import expm

from msctrack.cli import main as cli_main
from msctrack.coords import cart_kinematics_to_msc, wrap_angle
from msctrack.dynamics import (
    ProcessNoiseConfig,
    continuous_Q,
    discrete_Qd,
    drift,
    g_matrix,
    jacobian_A,
)
from msctrack.scheduler import SchedulerConfig, range_sigma
from msctrack.sim import (
    MeasurementNoise,
    monte_carlo,
    nees_band,
    paper_scenario,
)
from msctrack.state import IDX_PSI, IDX_S, IDX_THETA, ModelId, MscState
from msctrack.ukf import GaussianEstimate, Measurement, UtParams, predict, update


@pytest.fixture
def report(capfd):
    """Verdict printer that sidesteps output capture, then asserts."""

    def _report(name: str, ok: bool, detail: str) -> None:
        verdict = "PASS" if ok else "FAIL"
        with capfd.disabled():
            print(f"[{verdict}] {name}: {detail}", flush=True)
        assert ok, f"{name}: {detail}"

    return _report


@pytest.fixture(scope="session")
def paper_batch():
    """25 independently seeded runs of the benchmark scenario."""
    t0 = time.perf_counter()
    mc = monte_carlo(
        paper_scenario(),
        MeasurementNoise(),
        None,
        SchedulerConfig(),
        n_runs=25,
        base_seed=0,
    )
    return mc, time.perf_counter() - t0


# ---------------------------------------------------------------------------
# drift fields vs. finite differences of exact Cartesian motion


def _cartesian_truth(model, t):
    p0 = np.array([-2000.0, 500.0, 700.0])
    v0 = np.array([200.0, 0.0, 50.0])
    if model is ModelId.NCV:
        return p0 + v0 * t, v0, {}
    if model is ModelId.NCA:
        a = np.array([1.5, -2.0, 0.25])
        return p0 + v0 * t + 0.5 * a * t * t, v0 + a * t, {"acc": a}
    w = 0.25
    sw, cw = math.sin(w * t), math.cos(w * t)
    vx0, vy0, vz0 = v0
    vel = np.array([vx0 * cw - vy0 * sw, vx0 * sw + vy0 * cw, vz0])
    pos = p0 + np.array(
        [
            (vx0 * sw + vy0 * (cw - 1.0)) / w,
            (vx0 * (1.0 - cw) + vy0 * sw) / w,
            vz0 * t,
        ]
    )
    return pos, vel, {"turn_rate": w}


def test_drift_matches_differenced_cartesian_motion(report):
    """Converting exact Cartesian motion and central-differencing it
    reproduces each model's drift field at every sample point."""
    t0 = time.perf_counter()
    h = 1e-3
    worst = 0.0
    for model in (ModelId.NCV, ModelId.NCA, ModelId.CT):
        for t in np.linspace(0.1, 20.0, 100):
            states = []
            for tk in (t - h, t, t + h):
                pos, vel, extra = _cartesian_truth(model, tk)
                states.append(cart_kinematics_to_msc(pos, vel, model, **extra))
            dx = states[2].values - states[0].values
            dx[IDX_PSI] = wrap_angle(dx[IDX_PSI])
            fd = dx / (2.0 * h)
            f = drift(states[1].values, model)
            worst = max(worst, np.linalg.norm(fd - f) / np.linalg.norm(f))
    elapsed = time.perf_counter() - t0
    report(
        "drift equals differenced Cartesian truth (NCV/NCA/CT)",
        worst < 1e-6 and elapsed < 5.0,
        f"max relative deviation {worst:.2e} (limit 1e-6), {elapsed:.2f} s (limit 5 s)",
    )


# ---------------------------------------------------------------------------
# UKF degenerates to the closed-form Kalman filter on a linear problem


def test_ukf_reduces_to_closed_form_kalman_filter(report):
    """With motion only in the angle states the problem is exactly
    linear-Gaussian, so the UKF must track two scalar Kalman filters."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    eps = 1e-18  # keeps the dead channels factorizable without moving anything
    q, r = 1e-6, 4e-6
    dt = 0.5
    params = UtParams()

    est = GaussianEstimate(
        MscState(ModelId.NCV, np.array([0.0, 0.0, 0.0, 0.0, 0.3, 1e-3])),
        np.diag([eps, eps, eps, 4e-4, 4e-4, eps]),
    )
    q_full = np.diag([0.0, 0.0, 0.0, q, q, 0.0])
    r_cov = np.diag([r, r])

    kf_mean = np.array([0.0, 0.3])
    kf_var = np.array([4e-4, 4e-4])
    truth = kf_mean.copy()

    worst = 0.0
    for _ in range(100):
        truth = truth + math.sqrt(q) * rng.standard_normal(2)
        z = truth + math.sqrt(r) * rng.standard_normal(2)

        pred = predict(est, dt, q_full, params)
        est, _ = update(pred, Measurement(psi=z[0], theta=z[1], r=None), r_cov, params)

        kf_var = kf_var + q
        gain = kf_var / (kf_var + r)
        kf_mean = kf_mean + gain * (z - kf_mean)
        kf_var = (1.0 - gain) * kf_var

        ukf_mean = est.mean.values[[IDX_PSI, IDX_THETA]]
        worst = max(worst, np.abs(ukf_mean - kf_mean).max())
    elapsed = time.perf_counter() - t0
    report(
        "UKF matches closed-form Kalman filter on a linear problem",
        worst < 1e-8 and elapsed < 1.0,
        f"max mean deviation {worst:.2e} over 100 steps (limit 1e-8), "
        f"{elapsed:.2f} s (limit 1 s)",
    )


# ---------------------------------------------------------------------------
# inverted range feeds no other state's dynamics


def test_inverted_range_is_decoupled_in_all_models(report):
    rng = np.random.default_rng(21)
    bad = 0
    for model in (ModelId.NCV, ModelId.NCA, ModelId.CT):
        n = 1000
        states = np.column_stack(
            [
                rng.uniform(-0.1, 0.1, n),
                rng.uniform(-0.1, 0.1, n),
                rng.uniform(-0.2, 0.2, n),
                rng.uniform(-np.pi, np.pi, n),
                rng.uniform(-1.2, 1.2, n),
                10.0 ** rng.uniform(-4.0, -2.0, n),
            ]
        )
        if model is ModelId.NCA:
            states = np.column_stack([states, rng.uniform(-0.05, 0.05, (n, 3))])
        elif model is ModelId.CT:
            states = np.column_stack([states, rng.uniform(-0.5, 0.5, n)])
        scaled = states.copy()
        scaled[:, IDX_S] *= 10.0
        f0 = drift(states, model)
        f1 = drift(scaled, model)
        keep = [i for i in range(states.shape[1]) if i != IDX_S]
        bad += int(np.sum(f0[:, keep] != f1[:, keep]))
    report(
        "inverted range decoupled from every other state derivative",
        bad == 0,
        f"{bad} of 3000 random states changed a non-s derivative under s x10 "
        "(exact equality required)",
    )


# ---------------------------------------------------------------------------
# Monte-Carlo statistical checks on the benchmark scenario


def test_mean_nees_stays_in_confidence_band(paper_batch, report):
    mc, elapsed = paper_batch
    lo, hi = nees_band(25)
    t = mc.t
    considered = (t >= 2.0) & ~((t >= 30.0) & (t <= 40.0))
    in_band = (mc.mean_nees >= lo) & (mc.mean_nees <= hi)
    frac = in_band[considered].mean()
    report(
        "25-run mean NEES inside the 95% chi-square band",
        frac >= 0.85 and elapsed < 600.0,
        f"{frac * 100:.1f}% of {considered.sum()} considered frames in "
        f"[{lo:.3f}, {hi:.3f}] (need >= 85%), batch {elapsed:.0f} s (limit 600 s)",
    )


def _phase_masks(mc):
    sc = paper_scenario()
    t = mc.t
    phase = np.array([sc.phase_index(tk) for tk in t])
    warmup = np.arange(t.size) < SchedulerConfig().warmup_frames
    return phase, warmup


def test_turn_phases_schedule_range_more_often(paper_batch, report):
    """Per run, the range-request rate during both turn phases must beat
    the rate during the straight legs (warmup frames excluded)."""
    mc, _ = paper_batch
    phase, warmup = _phase_masks(mc)
    turn = np.isin(phase, (1, 3)) & ~warmup
    straight = np.isin(phase, (0, 2)) & ~warmup
    wins = 0
    for log in mc.runs:
        measured = log.range_measured
        wins += int(measured[turn].mean() > measured[straight].mean())
    report(
        "range scheduling rate higher in turn phases than straight legs",
        wins >= 0.8 * len(mc.runs),
        f"{wins}/{len(mc.runs)} runs (need >= 80%)",
    )


def test_turn_model_dominates_during_turns(paper_batch, report):
    """The coordinated-turn mixing probability should be the largest of
    the bank within the turn phases, past a 1 s transient."""
    mc, _ = paper_batch
    sc = paper_scenario()
    t = mc.t
    starts = np.cumsum([0.0] + [p.duration for p in sc.phases])
    eligible = ((t >= starts[1] + 1.0) & (t < starts[2])) | (
        (t >= starts[3] + 1.0) & (t < starts[4])
    )
    fracs = [
        (np.argmax(log.mu[eligible], axis=1) == 2).mean() for log in mc.runs
    ]
    mean_frac = float(np.mean(fracs))
    report(
        "turn-model probability largest during turn phases",
        mean_frac >= 0.60,
        f"largest for {mean_frac * 100:.1f}% of eligible frames, "
        f"averaged over {len(mc.runs)} runs (need >= 60%)",
    )


# ---------------------------------------------------------------------------
# scheduler transform vs. a 60-digit reference implementation


def _decimal_range_sigma(s_hat: float, p_s: float, lam: float) -> tuple[float, float]:
    """Straightforward weighted sigma-point form at 60-digit precision.

    Inputs convert exactly (Decimal of a float is exact); the negative
    reconstructed variance that the unscented transform can produce for
    wide spreads clamps to zero, matching the production convention.
    """
    with decimal.localcontext() as ctx:
        ctx.prec = 60
        one = decimal.Decimal(1)
        s = decimal.Decimal(s_hat)
        lam_d = decimal.Decimal(lam)
        npl = one + lam_d
        delta = (npl * decimal.Decimal(p_s)).sqrt()
        w0 = lam_d / npl
        wi = one / (2 * npl)
        inv = [one / s, one / (s + delta), one / (s - delta)]
        r_hat = w0 * inv[0] + wi * (inv[1] + inv[2])
        p_r = w0 * (inv[0] - r_hat) ** 2 + wi * (
            (inv[1] - r_hat) ** 2 + (inv[2] - r_hat) ** 2
        )
        if p_r < 0:
            p_r = decimal.Decimal(0)
        return float(r_hat), float(p_r.sqrt())


def test_range_sigma_matches_high_precision_oracle(report):
    rng = np.random.default_rng(31)
    worst = 0.0
    for i in range(1000):
        if i % 2:
            params = UtParams()
        else:
            params = UtParams(
                alpha=rng.uniform(0.3, 1.0), kappa=rng.uniform(-0.9, 3.0)
            )
        lam = params.lambda_for(1)
        s_hat = 10.0 ** rng.uniform(-4.0, -2.0)
        hi = 0.8 / max(1.0, math.sqrt(1.0 + lam))
        p_s = (rng.uniform(0.01, hi) * s_hat) ** 2
        r_hat, sigma_r = range_sigma(s_hat, p_s, params)
        r_ref, sigma_ref = _decimal_range_sigma(s_hat, p_s, lam)
        worst = max(
            worst,
            abs(r_hat - r_ref) / abs(r_ref),
            abs(sigma_r - sigma_ref) / abs(sigma_ref),
        )

    worst_delta = 0.0
    for i in range(300):
        params = UtParams() if i % 2 else UtParams(alpha=1.0, kappa=2.0)
        s_hat = 10.0 ** rng.uniform(-4.0, -2.0)
        sigma_s = rng.uniform(1e-6, 1e-3) * s_hat
        r_hat, sigma_r = range_sigma(s_hat, sigma_s**2, params)
        approx = sigma_s / (s_hat * s_hat)
        worst_delta = max(
            worst_delta,
            abs(sigma_r - approx) / approx,
            abs(r_hat - 1.0 / s_hat) / (1.0 / s_hat),
        )

    report(
        "range uncertainty transform matches 60-digit reference",
        worst < 1e-12 and worst_delta < 0.01,
        f"max relative deviation {worst:.2e} on 1000 triples (limit 1e-12); "
        f"delta-method deviation {worst_delta:.2e} for narrow spreads (limit 1e-2)",
    )


# ---------------------------------------------------------------------------
# one-point discretized noise vs. fine quadrature


def _quadrature_qd(x: MscState, cfg: ProcessNoiseConfig, dt: float) -> np.ndarray:
    a = jacobian_A(x)
    g = g_matrix(x)
    m = g @ continuous_Q(x.model, cfg, x) @ g.T
    nodes, weights = np.polynomial.legendre.leggauss(20)
    out = np.zeros_like(m)
    for node, weight in zip(nodes, weights):
        phi = expm(a * (0.5 * dt * (node + 1.0)))
        out += weight * phi @ m @ phi.T
    return 0.5 * dt * out


def test_discrete_noise_matches_fine_quadrature(report):
    rng = np.random.default_rng(41)
    cfg = ProcessNoiseConfig()
    dt = 0.033
    worst = 0.0
    for _ in range(100):
        values = np.array(
            [
                rng.uniform(-0.1, 0.1),
                rng.uniform(-0.1, 0.1),
                rng.uniform(-0.2, 0.2),
                rng.uniform(-np.pi, np.pi),
                rng.uniform(-1.2, 1.2),
                10.0 ** rng.uniform(-4.0, -2.0),
            ]
        )
        x = MscState(ModelId.NCV, values)
        qd = discrete_Qd(x, cfg, dt)
        ref = _quadrature_qd(x, cfg, dt)
        worst = max(worst, np.linalg.norm(qd - ref) / np.linalg.norm(ref))
    report(
        "discretized process noise within 5% of fine quadrature",
        worst < 0.05,
        f"max Frobenius-relative deviation {worst:.2e} over 100 states (limit 0.05)",
    )


# ---------------------------------------------------------------------------
# bitwise reproducibility of the CSV outputs


def test_identical_runs_write_identical_csvs(tmp_path, report):
    args = ["run", "--config", "paper_scenario", "--runs", "1", "--seed", "0"]
    assert cli_main(args + ["--out", str(tmp_path / "a")]) == 0
    assert cli_main(args + ["--out", str(tmp_path / "b")]) == 0
    same = all(
        filecmp.cmp(tmp_path / "a" / name, tmp_path / "b" / name, shallow=False)
        for name in ("run_0.csv", "summary.csv")
    )
    report(
        "repeated runs with one config and seed are byte-identical",
        same,
        "run_0.csv and summary.csv compared bytewise",
    )
