"""Software-defined scooter locomotion rig.

Emulated treadmill/handlebar encoders feed an MCU-equivalent mapping stage at
a fixed 157 ms cadence; commands travel over defined UART-frame and UDP-
datagram codecs into a virtual-scooter kinematics world, recordable,
replayable, and steerable live from a browser cockpit.
"""

__version__ = "0.1.0"

from .config import SimConfig, TransportConfig, parse_config
from .encoders import (
    AbsoluteAngle,
    EncoderConfig,
    IncrementalSample,
    QuadraturePhase,
    RideProfile,
    emulate_ride,
    quadrature_step,
    ticks_to_rps,
)
from .kinematics import KinematicParams, ScooterPose, step, zero_order_hold
from .pipeline import ControlStage, MotionCommand, PipelineConfig, steering_delta, throttle_map
from .session import SessionLog, parse_session_log, replay, run_session
from .telemetry import Receiver, decode_datagram, encode_datagram
from .uart import decode_frame, encode_frame

__all__ = [
    "AbsoluteAngle",
    "ControlStage",
    "EncoderConfig",
    "IncrementalSample",
    "KinematicParams",
    "MotionCommand",
    "PipelineConfig",
    "QuadraturePhase",
    "Receiver",
    "RideProfile",
    "ScooterPose",
    "SessionLog",
    "SimConfig",
    "TransportConfig",
    "decode_datagram",
    "decode_frame",
    "emulate_ride",
    "encode_datagram",
    "encode_frame",
    "parse_config",
    "parse_session_log",
    "quadrature_step",
    "replay",
    "run_session",
    "steering_delta",
    "step",
    "throttle_map",
    "ticks_to_rps",
    "zero_order_hold",
]
