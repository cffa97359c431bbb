"""Maneuvering-target tracking in modified spherical coordinates.

Bearings arrive every optical frame; active range measurements are
scheduled only when the filter's range uncertainty demands one. The
package provides the MSC dynamic models (NCV/NCA/CT), a UKF, an IMM
bank, the range-variance scheduler, a six-phase scenario simulator, and
a Monte-Carlo harness with CSV output.
"""

from .coords import SphericalPoint, cart_kinematics_to_msc, cart_to_spherical, msc_to_cart_kinematics, wrap_angle
from .dynamics import ModelId, MscState, ProcessNoiseConfig, discrete_Qd, discretize
from .errors import ConfigInvalid, TrackingError
from .imm import ImmBank, ImmConfig, combine, mix, step
from .scheduler import ScheduleDecision, SchedulerConfig, decide, range_sigma
from .sim import (
    FilterConfig,
    InitConfig,
    MeasurementNoise,
    MonteCarloResult,
    RunLog,
    Scenario,
    ScenarioPhase,
    monte_carlo,
    paper_scenario,
    run_track,
    truth_trajectory,
)
from .ukf import GaussianEstimate, Measurement, UtParams, predict, sigma_points, update

__version__ = "0.1.0"
