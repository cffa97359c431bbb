"""Interacting multiple model estimator over the per-model UKFs.

The three models share the six-state MSC core, so mixing and output
combination operate on that core only; NCA's sigma states and CT's turn
rate are private to their filters and pass through untouched. Angle
means use a reference-plus-wrapped-deviation form: with a single model
in the bank this collapses to the model's own value bitwise, which makes
a 1-model IMM trajectory indistinguishable from a bare UKF run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .dynamics import ProcessNoiseConfig, discrete_Qd, discretize
from .errors import (
    ConfigInvalid,
    DegenerateProbabilities,
    FactorizationFailed,
    SingularInnovation,
    StepLeftDomain,
)
from .state import CORE_DIM, IDX_PSI, IDX_S, ModelId, MscState
from .ukf import GaussianEstimate, Measurement, UtParams, lower_cholesky, predict, update
from .coords import wrap_angle

MODEL_ORDER = (ModelId.NCV, ModelId.NCA, ModelId.CT)

LIKELIHOOD_FLOOR = 1e-30

# Extras of a dormant model are re-zeroed after this many consecutive
# frames below the probability floor, with variances reopened to the
# initialization values.
EXTRAS_MU_FLOOR = 1e-6
EXTRAS_STALE_FRAMES = 30
OMEGA_T_STD0 = 0.5  # rad/s
SIGMA_EXTRA_SCALE0 = 5.0  # sigma-state std = 5*s


def default_markov(n: int = 3) -> np.ndarray:
    """Transition matrix with 0.990 self-probability, rest spread evenly."""
    if n == 1:
        return np.ones((1, 1))
    m = np.full((n, n), 0.010 / (n - 1))
    np.fill_diagonal(m, 0.990)
    return m


@dataclass
class ImmConfig:
    """Bank-level configuration shared by all model filters."""

    markov: np.ndarray = field(default_factory=default_markov)
    mu0: np.ndarray = field(default_factory=lambda: np.full(3, 1.0 / 3.0))
    ut: UtParams = field(default_factory=UtParams)
    process_noise: ProcessNoiseConfig = field(default_factory=ProcessNoiseConfig)
    sigma_psi: float = np.deg2rad(0.02)
    sigma_theta: float = np.deg2rad(0.02)
    sigma_r: float = 3.0

    def __post_init__(self) -> None:
        self.markov = np.asarray(self.markov, dtype=float)
        self.mu0 = np.asarray(self.mu0, dtype=float)
        bad = []
        if self.markov.ndim != 2 or self.markov.shape[0] != self.markov.shape[1]:
            bad.append(f"markov must be square, got shape {self.markov.shape}")
        else:
            if np.any(self.markov < 0) or np.any(self.markov > 1):
                bad.append("markov entries must lie in [0, 1]")
            for i, row_sum in enumerate(self.markov.sum(axis=1)):
                if abs(row_sum - 1.0) > 1e-12:
                    bad.append(f"markov row {i} sums to {row_sum}, expected 1")
            if self.mu0.shape != (self.markov.shape[0],):
                bad.append("mu0 length must match markov dimension")
        if np.any(self.mu0 < 0) or abs(self.mu0.sum() - 1.0) > 1e-12:
            bad.append(f"mu0 must be a probability vector, got {self.mu0}")
        for name in ("sigma_psi", "sigma_theta", "sigma_r"):
            if getattr(self, name) < 0:
                bad.append(f"{name} must be >= 0")
        if bad:
            raise ConfigInvalid(bad)

    def measurement_cov(self, with_range: bool) -> np.ndarray:
        diag = [self.sigma_psi**2, self.sigma_theta**2]
        if with_range:
            diag.append(self.sigma_r**2)
        return np.diag(diag)


@dataclass
class ImmBank:
    """Per-model filters with their probabilities and transition matrix."""

    filters: list[GaussianEstimate]
    mu: np.ndarray
    config: ImmConfig
    low_mu_frames: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        self.mu = np.asarray(self.mu, dtype=float)
        m = len(self.filters)
        if self.mu.shape != (m,) or self.config.markov.shape != (m, m):
            raise ConfigInvalid(
                [f"bank size mismatch: {m} filters, mu {self.mu.shape}, markov {self.config.markov.shape}"]
            )
        if np.any(self.mu < 0) or abs(self.mu.sum() - 1.0) > 1e-12:
            raise ConfigInvalid([f"mu must be a probability vector, got {self.mu}"])
        if self.low_mu_frames is None:
            self.low_mu_frames = np.zeros(m, dtype=int)

    @property
    def models(self) -> tuple[ModelId, ...]:
        return tuple(est.mean.model for est in self.filters)


def _weighted_core_mean(cores: np.ndarray, weights: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Probability-weighted core mean around a reference state.

    The psi component is averaged through wrapped deviations from the
    reference so values straddling +/-pi combine correctly; when one
    weight is 1 the reference itself is returned unchanged.
    """
    dev = cores - ref
    dev[:, IDX_PSI] = wrap_angle(dev[:, IDX_PSI])
    mean = ref + weights @ dev
    if not -np.pi < mean[IDX_PSI] <= np.pi:  # keep in-range values bitwise intact
        mean[IDX_PSI] = wrap_angle(mean[IDX_PSI])
    return mean


def _moment_match(cores: np.ndarray, covs: list[np.ndarray], weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and covariance of a mixture of core Gaussians."""
    ref = cores[int(np.argmax(weights))]
    mean = _weighted_core_mean(cores, weights, ref)
    dev = cores - mean
    dev[:, IDX_PSI] = wrap_angle(dev[:, IDX_PSI])
    cov = np.zeros((CORE_DIM, CORE_DIM))
    for i, w in enumerate(weights):
        if w == 0.0:
            continue
        cov += w * (covs[i] + np.outer(dev[i], dev[i]))
    return mean, cov


def mix(bank: ImmBank) -> list[GaussianEstimate]:
    """Mixed initial condition for each model filter.

    Standard IMM mixing on the shared core with mu_{i|j} = p_ij mu_i /
    c_j. Private extras are never mixed across models; each filter's own
    extras are re-attached to its mixed core through their conditional
    relation extras | core (regression on the core), which keeps the
    joint covariance positive semidefinite. Keeping the old cross blocks
    against a replaced core block does not: the result can go indefinite
    within a few frames. A delta mixing weight short-circuits to an
    exact copy of the filter's estimate.

    Raises:
        DegenerateProbabilities: if every predicted mode probability
            underflows.
    """
    pij = bank.config.markov
    c = pij.T @ bank.mu
    if np.all(c < 1e-30):
        raise DegenerateProbabilities(f"all predicted mode probabilities below 1e-30: {c}")

    cores = np.stack([est.mean.values[:CORE_DIM] for est in bank.filters])
    core_covs = [est.cov[:CORE_DIM, :CORE_DIM] for est in bank.filters]

    mixed: list[GaussianEstimate] = []
    for j, est in enumerate(bank.filters):
        w = pij[:, j] * bank.mu / c[j] if c[j] >= 1e-30 else None
        if w is None or w[j] == 1.0:
            # Nothing transitions in, or nothing transitions out: the
            # mixed condition is the filter's own estimate, bit for bit.
            mixed.append(GaussianEstimate(est.mean.copy(), est.cov.copy()))
            continue
        ref = est.mean.values[:CORE_DIM]
        mean_core = _weighted_core_mean(cores, w, ref)
        dev = cores - mean_core
        dev[:, IDX_PSI] = wrap_angle(dev[:, IDX_PSI])
        cov_core = np.zeros((CORE_DIM, CORE_DIM))
        for i, wi in enumerate(w):
            if wi == 0.0:
                continue
            cov_core += wi * (core_covs[i] + np.outer(dev[i], dev[i]))

        n = est.mean.values.size
        values = est.mean.values.copy()
        values[:CORE_DIM] = mean_core
        if n == CORE_DIM:
            mixed.append(GaussianEstimate(MscState(est.mean.model, values), cov_core))
            continue

        own_core_cov = est.cov[:CORE_DIM, :CORE_DIM]
        cross = est.cov[:CORE_DIM, CORE_DIM:]
        extras_cov = est.cov[CORE_DIM:, CORE_DIM:]
        chol = lower_cholesky(own_core_cov)
        white = solve_triangular(chol, cross, lower=True)
        slope = solve_triangular(chol.T, white, lower=False)  # core_cov^-1 @ cross
        cond_cov = extras_cov - white.T @ white

        d_core = mean_core - ref
        d_core[IDX_PSI] = wrap_angle(d_core[IDX_PSI])
        values[CORE_DIM:] += slope.T @ d_core
        new_cross = cov_core @ slope
        cov = np.empty((n, n))
        cov[:CORE_DIM, :CORE_DIM] = cov_core
        cov[:CORE_DIM, CORE_DIM:] = new_cross
        cov[CORE_DIM:, :CORE_DIM] = new_cross.T
        cov[CORE_DIM:, CORE_DIM:] = slope.T @ new_cross + cond_cov
        mixed.append(GaussianEstimate(MscState(est.mean.model, values), 0.5 * (cov + cov.T)))
    return mixed


def _reset_extras(est: GaussianEstimate) -> GaussianEstimate:
    """Zero a dormant model's private states and reopen their variances."""
    model = est.mean.model
    if model is ModelId.NCV:
        return est
    values = est.mean.values.copy()
    cov = est.cov.copy()
    s = values[IDX_S]
    values[CORE_DIM:] = 0.0
    cov[CORE_DIM:, :] = 0.0
    cov[:, CORE_DIM:] = 0.0
    if model is ModelId.NCA:
        np.fill_diagonal(cov[CORE_DIM:, CORE_DIM:], (SIGMA_EXTRA_SCALE0 * s) ** 2)
    else:
        cov[CORE_DIM, CORE_DIM] = OMEGA_T_STD0**2
    return GaussianEstimate(MscState(model, values), cov)


def combine(bank: ImmBank) -> GaussianEstimate:
    """Probability-weighted output estimate on the shared core.

    The covariance is the weighted per-model core covariance plus the
    spread-of-means term; the result is tagged NCV for its 6-state shape.
    """
    cores = np.stack([est.mean.values[:CORE_DIM] for est in bank.filters])
    core_covs = [est.cov[:CORE_DIM, :CORE_DIM] for est in bank.filters]
    mean, cov = _moment_match(cores, core_covs, bank.mu)
    return GaussianEstimate(MscState(ModelId.NCV, mean), 0.5 * (cov + cov.T))


def step(bank: ImmBank, z: Measurement, dt: float) -> tuple[ImmBank, GaussianEstimate]:
    """One full IMM cycle: mix, filter per model, update mu, combine.

    A model whose measurement update fails numerically keeps its
    predicted estimate and receives the likelihood floor; the bank keeps
    running. Returns the mutated bank and the combined core estimate
    (tagged NCV for its six-state shape).
    """
    cfg = bank.config
    c = cfg.markov.T @ bank.mu
    mixed = mix(bank)
    r_cov = cfg.measurement_cov(with_range=z.r is not None)

    likelihoods = np.empty(len(mixed))
    for j, est in enumerate(mixed):
        try:
            qd_at = discretize(est.mean, dt)
        except StepLeftDomain:
            qd_at = est.mean
        qd = discrete_Qd(qd_at, cfg.process_noise, dt)
        pred = predict(est, dt, qd, cfg.ut)
        try:
            post, like = update(pred, z, r_cov, cfg.ut)
        except (SingularInnovation, FactorizationFailed):
            post, like = pred, 0.0
        bank.filters[j] = post
        likelihoods[j] = max(like, LIKELIHOOD_FLOOR)

    mu = likelihoods * c
    bank.mu = mu / mu.sum()

    # Stale-extras housekeeping for models parked at negligible probability.
    bank.low_mu_frames = np.where(bank.mu < EXTRAS_MU_FLOOR, bank.low_mu_frames + 1, 0)
    for j, est in enumerate(bank.filters):
        if bank.low_mu_frames[j] >= EXTRAS_STALE_FRAMES and est.mean.model is not ModelId.NCV:
            bank.filters[j] = _reset_extras(est)
            bank.low_mu_frames[j] = 0

    return bank, combine(bank)
