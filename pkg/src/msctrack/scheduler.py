"""Range-measurement scheduling from inverted-range statistics.

The filter carries s = 1/r, so its covariance speaks about s. A scalar
three-point unscented transform converts (s_hat, P_s) into a range
standard deviation; when that exceeds the threshold (or the transform
itself breaks down because a sigma point crosses zero), an active range
measurement is requested for the current frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigInvalid, SigmaPointCrossesZero
from .ukf import UtParams


@dataclass(frozen=True)
class SchedulerConfig:
    """Scheduling policy knobs.

    The threshold is in meters of range std; during the first
    ``warmup_frames`` frames a range measurement is taken every frame
    regardless of it.
    """

    threshold_sigma_r: float = 5.0
    warmup_frames: int = 50
    ut_params: UtParams = field(default_factory=UtParams)

    def __post_init__(self) -> None:
        bad = []
        if self.threshold_sigma_r <= 0:
            bad.append(f"threshold_sigma_r must be > 0, got {self.threshold_sigma_r}")
        if self.warmup_frames < 0:
            bad.append(f"warmup_frames must be >= 0, got {self.warmup_frames}")
        if bad:
            raise ConfigInvalid(bad)


@dataclass(frozen=True)
class ScheduleDecision:
    measure_range: bool
    sigma_r: float
    r_hat: float


def range_sigma(s_hat: float, p_s: float, params: UtParams | None = None) -> tuple[float, float]:
    """Convert inverted-range mean/variance to range mean/std.

    Three sigma points s_hat and s_hat +/- sqrt((1+lambda) P_s) are
    pushed through r = 1/s and recombined with the scalar UT weights.
    The point differences are evaluated in their algebraically reduced
    form (r1 - r0 = -delta / (s (s+delta)) and so on): with the default
    alpha the center weight is about -1e6 and the naive differences of
    near-equal ranges would surrender five or six digits right where the
    threshold comparison happens. A slightly negative p_s (covariance
    roundoff) is treated as zero.

    Raises:
        SigmaPointCrossesZero: if any sigma point lands at s <= 0; the
            caller should treat range as effectively unobservable.
    """
    if params is None:
        params = UtParams()
    lam = params.lambda_for(1)
    if 1.0 + lam <= 0:
        raise ConfigInvalid([f"1 + lambda must be > 0, got {1.0 + lam}"])
    delta = math.sqrt((1.0 + lam) * max(p_s, 0.0))
    if s_hat <= 0.0 or s_hat - delta <= 0.0:
        raise SigmaPointCrossesZero(
            f"inverted-range sigma point not positive: "
            f"({s_hat:.3e}, {s_hat + delta:.3e}, {s_hat - delta:.3e})"
        )

    wi = 1.0 / (2.0 * (1.0 + lam))
    r0 = 1.0 / s_hat
    # exact rewrites of 1/(s +/- delta) - 1/s and their sum
    diff1 = -delta / (s_hat * (s_hat + delta))
    diff2 = delta / (s_hat * (s_hat - delta))
    diff_sum = 2.0 * delta * delta / (s_hat * (s_hat + delta) * (s_hat - delta))

    r_hat = r0 + wi * diff_sum
    # w0 d0^2 + wi (d1^2 + d2^2) reduced via w0 + 2 wi = 1; the raw form
    # cancels at ~1e6:1 for the default alpha, this one does not
    d0 = wi * diff_sum
    p_r = wi * (diff1 * diff1 + diff2 * diff2) - d0 * d0
    return r_hat, math.sqrt(max(p_r, 0.0))


def decide(cfg: SchedulerConfig, frame: int, s_hat: float, p_s: float) -> ScheduleDecision:
    """Per-frame scheduling decision.

    Fires during warmup, when sigma_r exceeds the threshold, or when the
    transform reports a zero-crossing sigma point (logged as infinite
    sigma_r). Re-evaluated every frame; the range update itself collapses
    sigma_r, so no explicit refractory period is needed.
    """
    try:
        r_hat, sigma_r = range_sigma(s_hat, p_s, cfg.ut_params)
        crossed = False
    except SigmaPointCrossesZero:
        r_hat = 1.0 / s_hat if s_hat > 0 else math.inf
        sigma_r = math.inf
        crossed = True
    measure = frame < cfg.warmup_frames or crossed or sigma_r > cfg.threshold_sigma_r
    return ScheduleDecision(measure_range=measure, sigma_r=sigma_r, r_hat=r_hat)
