"""Session configuration: all the numeric knobs in one bundle.

Config files are flat key-value text, one `section.key value` pair per line
with `#` comments, e.g.:

    encoder.pulses_per_revolution 600
    pipeline.throttle_gain 0.5
    kinematics.steering_mode bicycle
    transport.kind scripted
    transport.loss_pct 20
    transport.seed 42
    mode fast-forward

Unset keys keep their defaults. The same lines appear verbatim in session-log
headers, so a log always binds the exact configuration that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .encoders import EncoderConfig
from .kinematics import CadenceMismatch, KinematicParams
from .pipeline import PipelineConfig
from .telemetry import DEFAULT_PORT

LOOPBACK = "loopback"
UDP = "udp"
SCRIPTED = "scripted"

MODE_REALTIME = "realtime"
MODE_FAST_FORWARD = "fast-forward"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TransportConfig:
    kind: str = LOOPBACK
    address: str = "127.0.0.1"
    port: int = DEFAULT_PORT
    loss_pct: float = 0.0
    reorder_pct: float = 0.0
    duplicate_pct: float = 0.0
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in (LOOPBACK, UDP, SCRIPTED):
            raise ConfigError(f"unknown transport kind {self.kind!r}")
        for name, pct in (
            ("loss_pct", self.loss_pct),
            ("reorder_pct", self.reorder_pct),
            ("duplicate_pct", self.duplicate_pct),
        ):
            if not 0.0 <= pct <= 100.0:
                raise ConfigError(f"transport.{name} must lie in [0, 100], got {pct}")
        impaired = self.loss_pct or self.reorder_pct or self.duplicate_pct
        if self.kind == SCRIPTED and impaired and self.seed is None:
            raise ConfigError("transport.seed is mandatory when any impairment percentage is nonzero")


@dataclass(frozen=True)
class SimConfig:
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    kinematics: KinematicParams = field(default_factory=KinematicParams)
    transport: TransportConfig = field(default_factory=TransportConfig)
    mode: str = MODE_FAST_FORWARD
    max_rider_rps: float = 5.0  # physical limit for live setpoints

    def __post_init__(self) -> None:
        if self.mode not in (MODE_REALTIME, MODE_FAST_FORWARD):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.max_rider_rps <= 0:
            raise ConfigError("limits.max_rps must be > 0")
        if self.pipeline.control_period_us % self.kinematics.sim_dt_us != 0:
            raise CadenceMismatch(
                f"kinematics.sim_dt_us {self.kinematics.sim_dt_us} does not divide "
                f"pipeline.control_period_us {self.pipeline.control_period_us}"
            )


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_lines(config: SimConfig) -> list[str]:
    """Flat `key value` lines covering every knob; parse_config inverts this."""
    enc, pipe, kin, tr = config.encoder, config.pipeline, config.kinematics, config.transport
    lines = [
        f"encoder.pulses_per_revolution {enc.pulses_per_revolution}",
        f"encoder.angle_resolution_deg {_fmt(enc.angle_resolution_deg)}",
        f"pipeline.throttle_gain {_fmt(pipe.throttle_gain)}",
        f"pipeline.reference_angle_deg {_fmt(pipe.reference_angle_deg)}",
        f"pipeline.control_period_us {pipe.control_period_us}",
        f"kinematics.v_max {_fmt(kin.v_max)}",
        f"kinematics.steering_mode {kin.steering_mode}",
        f"kinematics.yaw_gain {_fmt(kin.yaw_gain)}",
        f"kinematics.wheelbase {_fmt(kin.wheelbase)}",
        f"kinematics.sim_dt_us {kin.sim_dt_us}",
        f"transport.kind {tr.kind}",
        f"transport.address {tr.address}",
        f"transport.port {tr.port}",
        f"transport.loss_pct {_fmt(tr.loss_pct)}",
        f"transport.reorder_pct {_fmt(tr.reorder_pct)}",
        f"transport.duplicate_pct {_fmt(tr.duplicate_pct)}",
        f"limits.max_rps {_fmt(config.max_rider_rps)}",
        f"mode {config.mode}",
    ]
    if tr.seed is not None:
        lines.insert(-2, f"transport.seed {tr.seed}")
    return lines


_INT_KEYS = {
    "encoder.pulses_per_revolution",
    "pipeline.control_period_us",
    "kinematics.sim_dt_us",
    "transport.port",
    "transport.seed",
}
_FLOAT_KEYS = {
    "encoder.angle_resolution_deg",
    "pipeline.throttle_gain",
    "pipeline.reference_angle_deg",
    "kinematics.v_max",
    "kinematics.yaw_gain",
    "kinematics.wheelbase",
    "transport.loss_pct",
    "transport.reorder_pct",
    "transport.duplicate_pct",
    "limits.max_rps",
}
_STR_KEYS = {"kinematics.steering_mode", "transport.kind", "transport.address", "mode"}


def parse_config_pairs(pairs: list[tuple[str, str]]) -> SimConfig:
    values: dict[str, object] = {}
    for key, raw in pairs:
        if key in _INT_KEYS:
            values[key] = int(raw)
        elif key in _FLOAT_KEYS:
            values[key] = float(raw)
        elif key in _STR_KEYS:
            values[key] = raw
        else:
            raise ConfigError(f"unknown config key {key!r}")

    def section(prefix: str) -> dict[str, object]:
        return {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith(prefix + ".")}

    enc = EncoderConfig(**section("encoder"))
    pipe = PipelineConfig(**section("pipeline"))
    kin = KinematicParams(**section("kinematics"))
    tr = TransportConfig(**section("transport"))
    extra: dict[str, object] = {}
    if "limits.max_rps" in values:
        extra["max_rider_rps"] = values["limits.max_rps"]
    if "mode" in values:
        extra["mode"] = values["mode"]
    return SimConfig(encoder=enc, pipeline=pipe, kinematics=kin, transport=tr, **extra)


def parse_config(text: str) -> SimConfig:
    """Parse the key-value config format; unknown keys and bad values raise ConfigError."""
    pairs: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise ConfigError(f"config line {lineno}: expected 'key value', got {raw!r}")
        pairs.append((parts[0], parts[1].strip()))
    try:
        return parse_config_pairs(pairs)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (ConfigError, CadenceMismatch)):
            raise
        raise ConfigError(str(exc)) from exc


def with_seed(config: SimConfig, seed: int) -> SimConfig:
    return replace(config, transport=replace(config.transport, seed=seed))


def with_mode(config: SimConfig, mode: str) -> SimConfig:
    return replace(config, mode=mode)
