"""Unscented Kalman filter over the MSC dynamics.

Sigma points use a single weight set (the same weights for mean and
covariance). With the default alpha = 1e-3 the center weight is a large
negative number, so all weighted sums here are computed in deviation
form around the center point; that is algebraically identical and keeps
cancellation error near machine precision.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .coords import wrap_angle
from .dynamics import drift
from .errors import ConfigInvalid, FactorizationFailed, SingularInnovation
from .state import IDX_PSI, IDX_S, IDX_THETA, ModelId, MscState

log = logging.getLogger(__name__)

# Recovery floors applied when a propagated sigma point (or mean) leaves
# the valid domain: inverted range and elevation are pulled back inside.
S_FLOOR = 1e-7
THETA_CEIL = np.pi / 2 - 1e-6


@dataclass(frozen=True)
class UtParams:
    """Unscented transform scaling parameters.

    lambda = alpha^2 (n + kappa) - n; the spread scale is sqrt(n+lambda).
    Defaults alpha = 1e-3, kappa = 0 keep n + lambda positive for every
    model dimension.
    """

    alpha: float = 1e-3
    kappa: float = 0.0

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ConfigInvalid([f"alpha must be > 0, got {self.alpha}"])

    def lambda_for(self, n: int) -> float:
        return self.alpha**2 * (n + self.kappa) - n

    def weights_for(self, n: int) -> np.ndarray:
        """The 2n+1 weights; index 0 is the center point's."""
        lam = self.lambda_for(n)
        if n + lam <= 0:
            raise ConfigInvalid([f"n + lambda must be > 0, got {n + lam}"])
        w = np.full(2 * n + 1, 1.0 / (2.0 * (n + lam)))
        w[0] = lam / (n + lam)
        return w


@dataclass
class GaussianEstimate:
    """Mean MSC state with its covariance (model dimension)."""

    mean: MscState
    cov: np.ndarray

    def __post_init__(self) -> None:
        self.cov = np.asarray(self.cov, dtype=float)
        n = self.mean.values.size
        if self.cov.shape != (n, n):
            raise ValueError(f"covariance shape {self.cov.shape} does not match state dim {n}")


@dataclass(frozen=True)
class SigmaPointSet:
    """2n+1 sigma points (rows) with their weights; row 0 is the mean."""

    points: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class Measurement:
    """Bearing pair with optional range; angles in radians, range in meters."""

    psi: float
    theta: float
    r: float | None = None

    @property
    def dim(self) -> int:
        return 2 if self.r is None else 3

    def vector(self) -> np.ndarray:
        if self.r is None:
            return np.array([self.psi, self.theta])
        return np.array([self.psi, self.theta, self.r])


def lower_cholesky(p: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor with a jitter ladder.

    On failure adds eps*I with eps = 1e-12*trace/n, doubling twice more
    before giving up.

    Raises:
        FactorizationFailed: if the matrix resists all jitter levels.
    """
    sym = 0.5 * (p + p.T)
    n = sym.shape[0]
    eps = 1e-12 * np.trace(sym) / n
    jitters = [0.0, eps, 2.0 * eps, 4.0 * eps]
    for jitter in jitters:
        try:
            return np.linalg.cholesky(sym + jitter * np.eye(n))
        except np.linalg.LinAlgError:
            continue
    raise FactorizationFailed(f"covariance not factorizable after jitter {jitters[-1]:.3e}")


def sigma_points(est: GaussianEstimate, params: UtParams) -> SigmaPointSet:
    """Standard symmetric sigma-point set from a Gaussian estimate."""
    mean = est.mean.values
    n = mean.size
    weights = params.weights_for(n)
    spread = np.sqrt(n + params.lambda_for(n)) * lower_cholesky(est.cov)
    points = np.empty((2 * n + 1, n))
    points[0] = mean
    points[1 : n + 1] = mean + spread.T  # rows of spread.T are scaled columns of L
    points[n + 1 :] = mean - spread.T
    return SigmaPointSet(points=points, weights=weights)


def _weighted_mean(points: np.ndarray, weights: np.ndarray, angle_cols: tuple[int, ...]) -> np.ndarray:
    """Weighted mean in deviation form around row 0.

    Angle columns are averaged via atan2 of weighted sin/cos so the
    result respects wraparound.
    """
    dev = points - points[0]
    mean = points[0] + weights @ dev
    for col in angle_cols:
        sin_sum = np.sin(points[0, col]) + weights @ (np.sin(points[:, col]) - np.sin(points[0, col]))
        cos_sum = np.cos(points[0, col]) + weights @ (np.cos(points[:, col]) - np.cos(points[0, col]))
        mean[col] = np.arctan2(sin_sum, cos_sum)
    return mean


def _deviations(points: np.ndarray, mean: np.ndarray, angle_cols: tuple[int, ...]) -> np.ndarray:
    dev = points - mean
    for col in angle_cols:
        dev[:, col] = wrap_angle(dev[:, col])
    return dev


def predict(
    est: GaussianEstimate,
    dt: float,
    noise: np.ndarray,
    params: UtParams = UtParams(),
) -> GaussianEstimate:
    """Time update: push sigma points through one Euler step, add noise.

    ``noise`` is the discrete process covariance for this step, already
    evaluated by the caller (the noise gain depends on the state, and the
    predicted-mean angles are the agreed evaluation point).

    Sigma points that leave the valid domain (s <= 0 or elevation at the
    pole) are clamped back inside and the event is logged; the filter
    keeps running.
    """
    sp = sigma_points(est, params)
    model = est.mean.model
    stepped = sp.points + drift(sp.points, model) * dt
    stepped[:, IDX_PSI] = wrap_angle(stepped[:, IDX_PSI])

    bad_s = stepped[:, IDX_S] <= 0.0
    if np.any(bad_s):
        log.warning("clamped %d sigma point(s) with nonpositive inverted range", int(bad_s.sum()))
        stepped[bad_s, IDX_S] = S_FLOOR
    bad_t = np.abs(stepped[:, IDX_THETA]) >= np.pi / 2
    if np.any(bad_t):
        log.warning("clamped %d sigma point(s) past the elevation pole", int(bad_t.sum()))
        stepped[bad_t, IDX_THETA] = np.sign(stepped[bad_t, IDX_THETA]) * THETA_CEIL

    mean = _weighted_mean(stepped, sp.weights, angle_cols=(IDX_PSI,))
    if mean[IDX_S] <= 0.0:
        log.warning("clamped predicted mean inverted range %g", mean[IDX_S])
        mean[IDX_S] = S_FLOOR
    dev = _deviations(stepped, mean, angle_cols=(IDX_PSI,))
    cov = (sp.weights * dev.T) @ dev + noise
    return GaussianEstimate(MscState(model, mean), 0.5 * (cov + cov.T))


def _measure_points(points: np.ndarray, with_range: bool) -> np.ndarray:
    """Map state sigma points to measurement space [psi, theta(, r=1/s)]."""
    cols = [points[:, IDX_PSI], points[:, IDX_THETA]]
    if with_range:
        cols.append(1.0 / points[:, IDX_S])
    return np.column_stack(cols)


def update(
    pred: GaussianEstimate,
    z: Measurement,
    r_cov: np.ndarray,
    params: UtParams = UtParams(),
) -> tuple[GaussianEstimate, float]:
    """Measurement update; returns the posterior and the innovation likelihood.

    The innovation covariance is P_zz + R; the likelihood is the Gaussian
    density of the (angle-wrapped) innovation under it, which the IMM
    layer consumes as the model likelihood.

    Raises:
        SingularInnovation: if P_zz + R is not positive definite.
    """
    r_cov = np.asarray(r_cov, dtype=float)
    if r_cov.shape != (z.dim, z.dim):
        raise ValueError(f"R shape {r_cov.shape} does not match measurement dim {z.dim}")

    sp = sigma_points(pred, params)
    z_points = _measure_points(sp.points, with_range=z.r is not None)
    angle_cols = (0,)
    z_hat = _weighted_mean(z_points, sp.weights, angle_cols=angle_cols)

    z_dev = _deviations(z_points, z_hat, angle_cols=angle_cols)
    x_dev = _deviations(sp.points, pred.mean.values, angle_cols=(IDX_PSI,))
    p_zz = (sp.weights * z_dev.T) @ z_dev
    p_xz = (sp.weights * x_dev.T) @ z_dev

    s_mat = p_zz + r_cov
    try:
        s_factor = cho_factor(0.5 * (s_mat + s_mat.T), lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularInnovation(f"innovation covariance not invertible: {exc}") from exc

    innovation = z.vector() - z_hat
    innovation[0] = wrap_angle(innovation[0])
    innovation[1] = wrap_angle(innovation[1])

    gain = cho_solve(s_factor, p_xz.T).T
    post_mean = pred.mean.values + gain @ innovation
    post_mean[IDX_PSI] = wrap_angle(post_mean[IDX_PSI])
    post_cov = pred.cov - gain @ s_mat @ gain.T
    post_cov = 0.5 * (post_cov + post_cov.T)

    # N(innovation; 0, S) via the Cholesky factor already in hand.
    m = z.dim
    half_quad = 0.5 * innovation @ cho_solve(s_factor, innovation)
    log_det = 2.0 * np.sum(np.log(np.diag(s_factor[0])))
    likelihood = float(np.exp(-half_quad - 0.5 * (m * np.log(2.0 * np.pi) + log_det)))

    return GaussianEstimate(MscState(pred.mean.model, post_mean), post_cov), likelihood
