"""Continuous-time MSC dynamics and their discretization.

Three target models share a six-state MSC core [omega, theta_dot, tau,
psi, theta, s]:

  NCV: nearly constant velocity, white acceleration noise (6 states).
  NCA: nearly constant acceleration, white jerk noise; appends the
       range-scaled Cartesian accelerations sigma = s*a (9 states).
  CT:  coordinated turn in the x-y plane, white turn-acceleration
       noise; appends the turn rate omega_T (7 states).

In all three, s appears in its own row (ds/dt = -tau*s) and as the
process-noise gain, never in the other derivative rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .coords import POLE_MARGIN, rotation_c_to_s, wrap_angle
from .errors import ConfigInvalid, ElevationSingularity, StepLeftDomain
from .state import (
    CORE_DIM,
    IDX_OMEGA,
    IDX_PSI,
    IDX_S,
    IDX_TAU,
    IDX_THETA,
    IDX_THETADOT,
    ModelId,
    MscState,
)

__all__ = [
    "ModelId",
    "MscState",
    "ProcessNoiseConfig",
    "f_ncv",
    "f_nca",
    "f_ct",
    "drift",
    "g_matrix",
    "discretize",
    "continuous_Q",
    "jacobian_A",
    "discrete_Qd",
]


@dataclass(frozen=True)
class ProcessNoiseConfig:
    """Continuous process-noise intensities.

    Args:
        sigma_accel: Acceleration noise std per Cartesian axis [m/s^2],
            used by NCV and by the translational part of CT.
        sigma_jerk: Jerk noise std per Cartesian axis [m/s^3], NCA only.
        q_turn: Turn-rate noise level [rad/s^2], CT only.
        q_turn_is_std: If True (default) the PSD entry for omega_T is
            q_turn squared; if False q_turn is the PSD entry itself.
    """

    sigma_accel: float = 2.0
    sigma_jerk: float = 15.0
    q_turn: float = 0.05
    q_turn_is_std: bool = True

    def __post_init__(self) -> None:
        bad = [
            f"{name} must be >= 0, got {val}"
            for name, val in (
                ("sigma_accel", self.sigma_accel),
                ("sigma_jerk", self.sigma_jerk),
                ("q_turn", self.q_turn),
            )
            if val < 0
        ]
        if bad:
            raise ConfigInvalid(bad)


def drift(values: np.ndarray, model: ModelId) -> np.ndarray:
    """Noise-free state derivative, vectorized over leading axes.

    ``values`` has the model's state components on the last axis; the
    result has the same shape. This is the workhorse behind the public
    per-model wrappers and the sigma-point propagation.

    Raises:
        ElevationSingularity: if any elevation is within 1e-9 rad of
            +/-pi/2 (tan/sec diverge there).
    """
    v = np.asarray(values, dtype=float)
    omega = v[..., IDX_OMEGA]
    theta_dot = v[..., IDX_THETADOT]
    tau = v[..., IDX_TAU]
    psi = v[..., IDX_PSI]
    theta = v[..., IDX_THETA]
    s = v[..., IDX_S]

    if np.any(np.abs(theta) >= np.pi / 2 - POLE_MARGIN):
        raise ElevationSingularity("elevation at or beyond the pole margin")

    sin_t, cos_t = np.sin(theta), np.cos(theta)
    tan_t = sin_t / cos_t

    out = np.empty_like(v)
    out[..., IDX_OMEGA] = -2.0 * tau * omega + theta_dot * omega * tan_t
    out[..., IDX_THETADOT] = -(omega**2) * tan_t - 2.0 * theta_dot * tau
    out[..., IDX_TAU] = theta_dot**2 + omega**2 - tau**2
    out[..., IDX_PSI] = omega / cos_t
    out[..., IDX_THETA] = theta_dot
    out[..., IDX_S] = -tau * s

    if model is ModelId.NCA:
        sx, sy, sz = v[..., 6], v[..., 7], v[..., 8]
        sin_p, cos_p = np.sin(psi), np.cos(psi)
        out[..., IDX_OMEGA] += -sin_p * sx + cos_p * sy
        out[..., IDX_THETADOT] += -sin_t * cos_p * sx - sin_t * sin_p * sy + cos_t * sz
        out[..., IDX_TAU] += cos_t * cos_p * sx + cos_t * sin_p * sy + sin_t * sz
        # sigma = s*a inherits the -tau*s decay of s (a itself is constant).
        out[..., 6] = -tau * sx
        out[..., 7] = -tau * sy
        out[..., 8] = -tau * sz
    elif model is ModelId.CT:
        omega_t = v[..., 6]
        out[..., IDX_OMEGA] += tau * omega_t * cos_t - theta_dot * omega_t * sin_t
        out[..., IDX_THETADOT] += omega_t * sin_t * omega
        out[..., IDX_TAU] += -omega_t * cos_t * omega
        out[..., 6] = 0.0  # turn rate is driven by noise only

    return out


def _f_model(x: MscState, model: ModelId) -> np.ndarray:
    if x.model is not model:
        raise ValueError(f"expected a {model.value} state, got {x.model.value}")
    return drift(x.values, model)


def f_ncv(x: MscState) -> np.ndarray:
    """Six NCV derivatives; see module docstring for the state order."""
    return _f_model(x, ModelId.NCV)


def f_nca(x: MscState) -> np.ndarray:
    """Nine NCA derivatives; the sigma rows are -tau*sigma."""
    return _f_model(x, ModelId.NCA)


def f_ct(x: MscState) -> np.ndarray:
    """Seven CT derivatives; d(omega_T)/dt = 0 in the noise-free part."""
    return _f_model(x, ModelId.CT)


def g_matrix(x: MscState) -> np.ndarray:
    """Process-noise gain matrix; every nonzero entry is s (or 1 for omega_T).

    Column order matches each model's noise vector: NCV rows 1-3 carry a
    diagonal of s; NCA rows 7-9 likewise; CT places s in the permuted
    pattern row1<-w_y, row2<-w_z, row3<-w_x with a unit gain on omega_T.
    """
    s = x.values[IDX_S]
    if x.model is ModelId.NCV:
        g = np.zeros((6, 3))
        g[0, 0] = g[1, 1] = g[2, 2] = s
    elif x.model is ModelId.NCA:
        g = np.zeros((9, 3))
        g[6, 0] = g[7, 1] = g[8, 2] = s
    else:
        g = np.zeros((7, 4))
        g[0, 1] = g[1, 2] = g[2, 0] = s
        g[6, 3] = 1.0
    return g


def discretize(x: MscState, dt: float) -> MscState:
    """One Euler step x + f(x)*dt with the azimuth re-wrapped.

    Raises:
        StepLeftDomain: if the stepped state has s <= 0 or |theta| >=
            pi/2. The caller decides recovery; nothing is clamped here.
    """
    stepped = x.values + drift(x.values, x.model) * dt
    stepped[IDX_PSI] = wrap_angle(stepped[IDX_PSI])
    if stepped[IDX_S] <= 0.0 or abs(stepped[IDX_THETA]) >= np.pi / 2:
        raise StepLeftDomain(
            f"step left the valid domain: s={stepped[IDX_S]:.3e}, "
            f"theta={stepped[IDX_THETA]:.6f}"
        )
    return MscState(x.model, stepped)


def continuous_Q(model: ModelId, cfg: ProcessNoiseConfig, x: MscState) -> np.ndarray:
    """PSD matrix of the continuous noise vector.

    NCV and CT rotate the Cartesian acceleration PSD into the spherical
    frame with C_c^s at the state's angles; NCA's jerk PSD is frame
    diagonal already. CT appends the scalar turn-rate intensity.
    """
    if model is ModelId.NCA:
        return np.eye(3) * cfg.sigma_jerk**2
    c = rotation_c_to_s(x.values[IDX_PSI], x.values[IDX_THETA])
    q_accel = c @ (np.eye(3) * cfg.sigma_accel**2) @ c.T
    if model is ModelId.NCV:
        return q_accel
    q = np.zeros((4, 4))
    q[:3, :3] = q_accel
    q[3, 3] = cfg.q_turn**2 if cfg.q_turn_is_std else cfg.q_turn
    return q


def jacobian_A(x: MscState) -> np.ndarray:
    """State Jacobian of the drift by central differences.

    Step h_i = 1e-6*max(1, |x_i|); second-order accuracy is plenty for
    the mid-point discretization the result feeds.
    """
    v = x.values
    n = v.size
    h = 1e-6 * np.maximum(1.0, np.abs(v))
    plus = np.tile(v, (n, 1))
    minus = np.tile(v, (n, 1))
    idx = np.arange(n)
    plus[idx, idx] += h
    minus[idx, idx] -= h
    df = drift(plus, x.model) - drift(minus, x.model)
    return df.T / (2.0 * h)


def discrete_Qd(x: MscState, cfg: ProcessNoiseConfig, dt: float) -> np.ndarray:
    """Discrete process covariance by the mid-point rule.

    S = g*Q*g^T is the state-space PSD; the integral over one step is
    approximated as exp(A*dt/2) * S*dt * exp(A*dt/2)^T and symmetrized.
    """
    g = g_matrix(x)
    s_psd = g @ continuous_Q(x.model, cfg, x) @ g.T
    phi_half = expm(jacobian_A(x) * (dt / 2.0))
    qd = phi_half @ (s_psd * dt) @ phi_half.T
    return 0.5 * (qd + qd.T)
