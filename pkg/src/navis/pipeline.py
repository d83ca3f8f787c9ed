"""MCU-equivalent processing stage.

Sensor readings become one normalized MotionCommand per control period
(157 ms by default): treadmill rev/s goes through a clamped linear map into
throttle [-1, 1], and the handlebar angle's wrapped offset from its calibrated
reference becomes the steering delta in [-180, 180] (positive = right turn).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .angles import clamp, wrap_delta_deg
from .encoders import AbsoluteAngle, EncoderConfig, IncrementalSample, ticks_to_rps
from .wire import RangeExceeded

CONTROL_PERIOD_US_DEFAULT = 157000


class NonFiniteInput(ValueError):
    """NaN or infinity fed to a mapping that requires a finite value."""


@dataclass(frozen=True)
class MotionCommand:
    """One control update: throttle in [-1, 1], steering delta in [-180, 180] degrees."""

    throttle: float
    steering_delta_deg: float

    def __post_init__(self) -> None:
        if not (-1.0 <= self.throttle <= 1.0):
            raise RangeExceeded(f"throttle {self.throttle} outside [-1, 1]")
        if not (-180.0 <= self.steering_delta_deg <= 180.0):
            raise RangeExceeded(f"steering_delta_deg {self.steering_delta_deg} outside [-180, 180]")


@dataclass(frozen=True)
class PipelineConfig:
    throttle_gain: float = 0.5  # throttle per rev/s; default saturates at 2 rev/s
    reference_angle_deg: float = 0.0  # handlebar center calibration
    control_period_us: int = CONTROL_PERIOD_US_DEFAULT

    def __post_init__(self) -> None:
        if self.throttle_gain <= 0:
            raise ValueError("throttle_gain must be > 0")
        if self.control_period_us <= 0:
            raise ValueError("control_period_us must be > 0")
        if not (0.0 <= self.reference_angle_deg < 360.0):
            raise ValueError("reference_angle_deg must lie in [0, 360)")


def throttle_map(rps: float, config: PipelineConfig) -> float:
    """Clamped linear map from treadmill rev/s to throttle in [-1, 1]."""
    if not math.isfinite(rps):
        raise NonFiniteInput(f"rps must be finite, got {rps}")
    return clamp(config.throttle_gain * rps, -1.0, 1.0)


def steering_delta(current: AbsoluteAngle, config: PipelineConfig) -> float:
    """Signed handlebar offset from the reference, wrapped into (-180, 180].

    The wrap already lands inside the limit; the final clamp restates the
    [-180, 180] bound so it holds no matter what the wrap produced.
    """
    delta = wrap_delta_deg(current.degrees - config.reference_angle_deg)
    return clamp(delta, -180.0, 180.0)


class ControlStage:
    """Fixed-cadence sensor-to-command state machine.

    Call tick() exactly once per control period with the sensor sample pairs
    observed since the previous call. The stage tracks the cumulative tick
    count between windows and holds the last steering output across empty
    windows (a stopped treadmill reads zero, a handlebar keeps its angle).
    """

    def __init__(self, config: PipelineConfig, encoder: EncoderConfig):
        self.config = config
        self.encoder = encoder
        self._last_tick_count = 0
        self._last_steering = 0.0

    def tick(self, samples: Sequence[tuple[IncrementalSample, AbsoluteAngle]]) -> MotionCommand:
        if not samples:
            return MotionCommand(0.0, self._last_steering)
        period_s = self.config.control_period_us * 1e-6
        inc, angle = samples[-1]
        rps = ticks_to_rps(inc.tick_count - self._last_tick_count, self.encoder, period_s)
        self._last_tick_count = inc.tick_count
        return self.command_from(rps, angle.degrees)

    def command_from(self, rps: float, handlebar_deg: float) -> MotionCommand:
        """Map one (rev/s, handlebar angle) reading; used for UART-decoded frames."""
        steering = steering_delta(AbsoluteAngle(handlebar_deg), self.config)
        self._last_steering = steering
        return MotionCommand(throttle_map(rps, self.config), steering)
