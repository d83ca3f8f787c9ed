"""Virtual scooter motion.

Commands map onto planar pose updates with explicit Euler integration and the
pre-step heading. Two steering laws are available:

  direct-rate  heading rate = steering_delta * yaw_gain (deg/s per deg held);
               a held handlebar turns the scooter at a constant rate.
  bicycle      heading rate = (v / wheelbase) * tan(steer), steer clamped to
               +/-80 deg to stay clear of the tangent singularity.

Heading 0 points along +x and increases toward +y; a positive steering delta
(right turn) therefore increases the heading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .angles import clamp, normalize_deg
from .pipeline import MotionCommand

DIRECT_RATE = "direct-rate"
BICYCLE = "bicycle"
BICYCLE_STEER_LIMIT_DEG = 80.0


class NonPositiveDt(ValueError):
    """Integration step must cover positive time."""


class CadenceMismatch(ValueError):
    """sim_dt_us must divide the command period for zero-order hold."""


@dataclass(frozen=True)
class ScooterPose:
    """Planar pose: x, y in meters, heading_deg normalized into [0, 360)."""

    x: float = 0.0
    y: float = 0.0
    heading_deg: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"pose position must be finite, got ({self.x}, {self.y})")
        object.__setattr__(self, "heading_deg", normalize_deg(self.heading_deg))


@dataclass(frozen=True)
class KinematicParams:
    v_max: float = 6.0  # m/s at full throttle, a brisk kick-scooter pace
    steering_mode: str = DIRECT_RATE
    yaw_gain: float = 1.0  # (deg/s) per held degree, direct-rate mode
    wheelbase: float = 0.85  # meters, bicycle mode
    sim_dt_us: int = 1000  # must divide the control period for zero-order hold

    def __post_init__(self) -> None:
        if self.v_max <= 0:
            raise ValueError("v_max must be > 0")
        if self.wheelbase <= 0:
            raise ValueError("wheelbase must be > 0")
        if self.sim_dt_us <= 0:
            raise ValueError("sim_dt_us must be > 0")
        if self.steering_mode not in (DIRECT_RATE, BICYCLE):
            raise ValueError(f"unknown steering_mode {self.steering_mode!r}")


def step(pose: ScooterPose, cmd: MotionCommand, params: KinematicParams, dt: float) -> ScooterPose:
    """Advance one explicit-Euler step of dt seconds.

    Position integrates along the pre-step heading; the heading then advances
    by the mode's turn rate and renormalizes into [0, 360).
    """
    if dt <= 0:
        raise NonPositiveDt(f"dt must be > 0, got {dt}")
    v = cmd.throttle * params.v_max
    h_rad = math.radians(pose.heading_deg)
    x = pose.x + v * math.cos(h_rad) * dt
    y = pose.y + v * math.sin(h_rad) * dt
    if params.steering_mode == DIRECT_RATE:
        rate_deg = cmd.steering_delta_deg * params.yaw_gain
    else:
        steer = clamp(cmd.steering_delta_deg, -BICYCLE_STEER_LIMIT_DEG, BICYCLE_STEER_LIMIT_DEG)
        rate_deg = math.degrees((v / params.wheelbase) * math.tan(math.radians(steer)))
    return ScooterPose(x, y, pose.heading_deg + rate_deg * dt)


def zero_order_hold(
    commands: Iterable[MotionCommand],
    params: KinematicParams,
    control_period_us: int,
    initial_pose: ScooterPose = ScooterPose(),
) -> list[tuple[int, ScooterPose]]:
    """Integrate a command log at sim_dt resolution, holding each command flat
    for its whole control period. Returns (t_us, pose) per sim tick."""
    if control_period_us % params.sim_dt_us != 0:
        raise CadenceMismatch(
            f"sim_dt_us {params.sim_dt_us} does not divide control period {control_period_us}"
        )
    steps_per_cmd = control_period_us // params.sim_dt_us
    dt_s = params.sim_dt_us * 1e-6
    trajectory: list[tuple[int, ScooterPose]] = []
    pose = initial_pose
    t_us = 0
    for cmd in commands:
        for _ in range(steps_per_cmd):
            t_us += params.sim_dt_us
            pose = step(pose, cmd, params, dt_s)
            trajectory.append((t_us, pose))
    return trajectory


def format_trajectory_line(t_us: int, pose: ScooterPose) -> str:
    """`t_us x y heading_deg` with fixed 6-decimal fields for reproducible diffs."""
    return f"{t_us} {pose.x:.6f} {pose.y:.6f} {pose.heading_deg:.6f}"


def export_trajectory(trajectory: Sequence[tuple[int, ScooterPose]]) -> str:
    return "\n".join(format_trajectory_line(t, p) for t, p in trajectory) + ("\n" if trajectory else "")
