"""Target state representation in modified spherical coordinates.

The shared 6-state core is [omega, thetadot, tau, psi, theta, s]:

    omega    azimuth rate projected by elevation, psi_dot*cos(theta) [rad/s]
    thetadot elevation rate [rad/s]
    tau      range rate over range, r_dot/r [1/s]
    psi      azimuth [rad], kept in (-pi, pi]
    theta    elevation [rad], |theta| < pi/2
    s        inverted range 1/r [1/m], s > 0

Model-specific extras follow the core: the constant-acceleration model
appends sigma_x, sigma_y, sigma_z (s times Cartesian acceleration, 1/s^2
each); the coordinated-turn model appends the turn rate omega_t [rad/s].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

# Index of each core state within the state vector.
IDX_OMEGA = 0
IDX_THETADOT = 1
IDX_TAU = 2
IDX_PSI = 3
IDX_THETA = 4
IDX_S = 5
CORE_DIM = 6


class ModelId(Enum):
    """Kinematic model identifier."""

    NCV = "ncv"  # nearly constant velocity, 6 states
    NCA = "nca"  # nearly constant acceleration, 9 states
    CT = "ct"    # coordinated turn in the x-y plane, 7 states

    @property
    def dim(self) -> int:
        return _MODEL_DIM[self]


_MODEL_DIM = {ModelId.NCV: 6, ModelId.NCA: 9, ModelId.CT: 7}


@dataclass
class MscState:
    """Model-tagged state vector in modified spherical coordinates.

    Args:
        model: Kinematic model that fixes the vector layout.
        values: State vector of length ``model.dim``.
    """

    model: ModelId
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.model.dim,):
            raise ValueError(
                f"{self.model.name} state needs {self.model.dim} values, "
                f"got shape {self.values.shape}"
            )

    @property
    def core(self) -> np.ndarray:
        """View of the shared 6-state core."""
        return self.values[:CORE_DIM]

    @property
    def extras(self) -> np.ndarray:
        """View of the model-specific trailing states (may be empty)."""
        return self.values[CORE_DIM:]

    def copy(self) -> "MscState":
        return MscState(self.model, self.values.copy())

    def is_valid(self) -> bool:
        """True when s > 0 and the elevation is clear of the poles."""
        v = self.values
        return bool(
            np.all(np.isfinite(v))
            and v[IDX_S] > 0.0
            and abs(v[IDX_THETA]) < np.pi / 2
        )
