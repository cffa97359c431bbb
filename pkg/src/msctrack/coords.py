"""Coordinate transforms between Cartesian, spherical, and MSC frames.

Conventions: azimuth psi = atan2(y, x) in (-pi, pi], elevation
theta = atan2(z, sqrt(x^2+y^2)) in (-pi/2, pi/2), range r = |pos|.
The sensor sits at the origin and is stationary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ElevationSingularity, MissingInput, NonpositiveInverseRange, ZeroVector
from .state import (
    IDX_OMEGA,
    IDX_PSI,
    IDX_S,
    IDX_TAU,
    IDX_THETA,
    IDX_THETADOT,
    ModelId,
    MscState,
)

# Inputs with |theta| within this margin of +/-pi/2 are rejected: the MSC
# dynamics contain tan(theta).
POLE_MARGIN = 1e-9


def wrap_angle(angle):
    """Wrap an angle (scalar or array) to (-pi, pi]."""
    wrapped = np.mod(np.asarray(angle, dtype=float) + np.pi, 2.0 * np.pi)
    wrapped = np.where(wrapped == 0.0, 2.0 * np.pi, wrapped) - np.pi
    if np.ndim(angle) == 0:
        return float(wrapped)
    return wrapped


@dataclass(frozen=True)
class SphericalPoint:
    """Azimuth/elevation/range triple.

    Invariants: r > 0, theta in (-pi/2, pi/2), psi in (-pi, pi].
    """

    psi: float
    theta: float
    r: float


def cart_to_spherical(pos) -> SphericalPoint:
    """Convert a sensor-relative Cartesian position to spherical coordinates.

    Raises:
        ZeroVector: if |pos| = 0.
        ElevationSingularity: if the point is within 1e-9 rad of a pole.
    """
    x, y, z = np.asarray(pos, dtype=float)
    r = float(np.sqrt(x * x + y * y + z * z))
    if r == 0.0:
        raise ZeroVector("cannot convert the origin to spherical coordinates")
    psi = float(np.arctan2(y, x))
    theta = float(np.arctan2(z, np.sqrt(x * x + y * y)))
    if abs(theta) >= np.pi / 2 - POLE_MARGIN:
        raise ElevationSingularity(f"elevation {theta:.12f} rad is at the pole")
    return SphericalPoint(psi=psi, theta=theta, r=r)


def spherical_to_cart(point: SphericalPoint) -> np.ndarray:
    """Inverse of :func:`cart_to_spherical`; returns [x, y, z] in meters."""
    cos_t = np.cos(point.theta)
    return point.r * np.array([
        cos_t * np.cos(point.psi),
        cos_t * np.sin(point.psi),
        np.sin(point.theta),
    ])


def rotation_y(angle: float) -> np.ndarray:
    """Elementary rotation about the y axis."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([
        [c, 0.0, -s],
        [0.0, 1.0, 0.0],
        [s, 0.0, c],
    ])


def rotation_z(angle: float) -> np.ndarray:
    """Elementary rotation about the z axis."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([
        [c, s, 0.0],
        [-s, c, 0.0],
        [0.0, 0.0, 1.0],
    ])


def rotation_c_to_s(psi: float, theta: float) -> np.ndarray:
    """Rotation matrix from the Cartesian to the spherical frame.

    Composed as C_y(-theta) @ C_z(psi); orthonormal with det +1.
    """
    return rotation_y(-theta) @ rotation_z(psi)


def cart_kinematics_to_msc(
    pos,
    vel,
    model: ModelId,
    acc=None,
    turn_rate: float | None = None,
) -> MscState:
    """Build an MSC state from Cartesian position/velocity (and extras).

    The core states follow from differentiating the spherical transform:
    psi_dot = (x*vy - y*vx)/(x^2+y^2), theta_dot from atan2(z, rho),
    tau = r_dot/r, omega = psi_dot*cos(theta), s = 1/r.

    Args:
        pos: Cartesian position [m], nonzero norm.
        vel: Cartesian velocity [m/s].
        model: Target kinematic model; NCA requires ``acc``, CT requires
            ``turn_rate``.
        acc: Cartesian acceleration [m/s^2] (NCA only); the appended states
            are s times these components.
        turn_rate: Turn rate in the x-y plane [rad/s] (CT only).

    Raises:
        ZeroVector: if |pos| = 0.
        ElevationSingularity: near the elevation poles.
        MissingInput: if a model-required extra is absent.
    """
    pos = np.asarray(pos, dtype=float)
    vel = np.asarray(vel, dtype=float)
    x, y, z = pos
    vx, vy, vz = vel

    sp = cart_to_spherical(pos)  # raises ZeroVector / ElevationSingularity
    rho_sq = x * x + y * y
    rho = np.sqrt(rho_sq)
    r = sp.r

    r_dot = float(pos @ vel) / r
    psi_dot = (x * vy - y * vx) / rho_sq
    rho_dot = (x * vx + y * vy) / rho
    theta_dot = (vz * rho - z * rho_dot) / (r * r)

    core = [
        psi_dot * np.cos(sp.theta),
        theta_dot,
        r_dot / r,
        sp.psi,
        sp.theta,
        1.0 / r,
    ]

    if model is ModelId.NCV:
        return MscState(model, np.array(core))
    if model is ModelId.NCA:
        if acc is None:
            raise MissingInput("NCA conversion requires a Cartesian acceleration")
        acc = np.asarray(acc, dtype=float)
        return MscState(model, np.array(core + list(acc / r)))
    if model is ModelId.CT:
        if turn_rate is None:
            raise MissingInput("CT conversion requires a turn rate")
        return MscState(model, np.array(core + [float(turn_rate)]))
    raise ValueError(f"unknown model {model!r}")


def msc_to_cart_kinematics(state: MscState) -> tuple[np.ndarray, np.ndarray]:
    """Recover Cartesian position and velocity from an MSC state.

    Raises:
        NonpositiveInverseRange: if s <= 0.
    """
    v = state.values
    omega, theta_dot, tau = v[IDX_OMEGA], v[IDX_THETADOT], v[IDX_TAU]
    psi, theta, s = v[IDX_PSI], v[IDX_THETA], v[IDX_S]
    if s <= 0.0:
        raise NonpositiveInverseRange(f"inverted range {s} is not positive")

    r = 1.0 / s
    r_dot = tau * r
    psi_dot = omega / np.cos(theta)

    cos_t, sin_t = np.cos(theta), np.sin(theta)
    cos_p, sin_p = np.cos(psi), np.sin(psi)

    pos = r * np.array([cos_t * cos_p, cos_t * sin_p, sin_t])
    vel = np.array([
        r_dot * cos_t * cos_p - r * theta_dot * sin_t * cos_p - r * psi_dot * cos_t * sin_p,
        r_dot * cos_t * sin_p - r * theta_dot * sin_t * sin_p + r * psi_dot * cos_t * cos_p,
        r_dot * sin_t + r * theta_dot * cos_t,
    ])
    return pos, vel
