"""Headless session engine: emulator -> MCU stage -> telemetry -> kinematics.

One session owns one logical timeline, advanced in sim_dt steps. Every
control period the sensor window is aggregated into a UART frame, decoded on
the MCU side into a MotionCommand, shipped as a datagram through the
configured transport, and applied by the receiver under latest-seq-wins. The
pose integrates every sim tick under zero-order hold of the active command.

Sessions record line-oriented logs (`navis-log 1` header, config snapshot,
then time-ordered events) that replay to the identical trajectory.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .config import (
    LOOPBACK,
    MODE_REALTIME,
    SCRIPTED,
    UDP,
    SimConfig,
    config_lines,
    parse_config_pairs,
)
from .encoders import (
    AbsoluteAngle,
    EncoderConfig,
    IncrementalSample,
    RideProfile,
    quantize_angle,
    ticks_to_rps,
)
from .kinematics import ScooterPose, step
from .links import LoopbackLink, ScriptedLink, UdpLink
from .pipeline import ControlStage
from .telemetry import Receiver, default_failsafe_timeout_us, encode_datagram
from .uart import decode_frame, encode_frame

LOG_MAGIC = "navis-log"
LOG_VERSION = 1

EVENT_SAMPLE = "SAMPLE"
EVENT_UART = "UART"
EVENT_TX = "TX"
EVENT_RX = "RX"
EVENT_POSE = "POSE"
_EVENT_KINDS = (EVENT_SAMPLE, EVENT_UART, EVENT_TX, EVENT_RX, EVENT_POSE)


class SessionError(RuntimeError):
    """A module failure surfaced through the session, with stage attribution."""


class VersionMismatch(ValueError):
    pass


class RefusedConfigMismatch(ValueError):
    """Replay was handed a config that differs from the one bound in the log header."""


class CorruptLog(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class LogEvent:
    t_us: int
    kind: str
    payload: str


@dataclass
class SessionLog:
    config: SimConfig
    events: list[LogEvent] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"{LOG_MAGIC} {LOG_VERSION}"]
        lines += [f"config {line}" for line in config_lines(self.config)]
        lines += [f"{e.t_us} {e.kind} {e.payload}" for e in self.events]
        return "\n".join(lines) + "\n"

    def poses(self) -> list[tuple[int, ScooterPose]]:
        out = []
        for e in self.events:
            if e.kind == EVENT_POSE:
                x, y, h = (float(v) for v in e.payload.split())
                out.append((e.t_us, ScooterPose(x, y, h)))
        return out

    def count(self, kind: str) -> int:
        return sum(1 for e in self.events if e.kind == kind)


def parse_session_log(text: str) -> SessionLog:
    lines = text.splitlines()
    if not lines:
        raise VersionMismatch("empty log")
    head = lines[0].split()
    if len(head) != 2 or head[0] != LOG_MAGIC:
        raise VersionMismatch(f"not a session log: {lines[0]!r}")
    if head[1] != str(LOG_VERSION):
        raise VersionMismatch(f"log version {head[1]} unsupported (expected {LOG_VERSION})")

    pairs: list[tuple[str, str]] = []
    events: list[LogEvent] = []
    last_t = None
    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("config "):
            if events:
                raise CorruptLog("config line after first event", line_no)
            parts = line.split(None, 2)
            if len(parts) != 3:
                raise CorruptLog(f"malformed config line {raw!r}", line_no)
            pairs.append((parts[1], parts[2]))
            continue
        parts = line.split(None, 2)
        if len(parts) != 3:
            raise CorruptLog(f"malformed event line {raw!r}", line_no)
        t_str, kind, payload = parts
        try:
            t_us = int(t_str)
        except ValueError:
            raise CorruptLog(f"bad timestamp {t_str!r}", line_no) from None
        if kind not in _EVENT_KINDS:
            raise CorruptLog(f"unknown event kind {kind!r}", line_no)
        if last_t is not None and t_us < last_t:
            raise CorruptLog(f"timestamp {t_us} decreases (previous {last_t})", line_no)
        last_t = t_us
        events.append(LogEvent(t_us, kind, payload))
    try:
        config = parse_config_pairs(pairs)
    except ValueError as exc:
        raise CorruptLog(f"bad config snapshot: {exc}", 1) from exc
    return SessionLog(config, events)


class ScriptRider:
    """Virtual rider following a ride script; idle (zero everything) when the script is empty."""

    def __init__(self, profile: RideProfile, encoder: EncoderConfig):
        self._profile = profile
        self._encoder = encoder

    def sample(self, t_us: int) -> tuple[IncrementalSample, AbsoluteAngle]:
        if len(self._profile) == 0:
            return IncrementalSample(0, t_us), AbsoluteAngle(0.0)
        count = round(self._profile.revs_until(t_us) * self._encoder.pulses_per_revolution)
        angle = quantize_angle(self._profile.handlebar_at(t_us), self._encoder)
        return IncrementalSample(count, t_us), angle


class LiveRider:
    """Virtual rider steered by live setpoints; each set acts like a script line at `now`.

    The treadmill rate holds its current target between updates, so the
    revolution integral accumulates exactly; the handlebar jumps to its
    target (ramping is the client's job).
    """

    def __init__(self, encoder: EncoderConfig):
        self._encoder = encoder
        self._rps = 0.0
        self._deg = 0.0
        self._revs = 0.0
        self._last_t_us = 0

    @property
    def targets(self) -> tuple[float, float]:
        return self._rps, self._deg

    def set_targets(self, rps: float, handlebar_deg: float, t_us: int) -> None:
        self._advance(t_us)
        self._rps = rps
        self._deg = handlebar_deg

    def _advance(self, t_us: int) -> None:
        if t_us > self._last_t_us:
            self._revs += self._rps * (t_us - self._last_t_us) * 1e-6
            self._last_t_us = t_us

    def sample(self, t_us: int) -> tuple[IncrementalSample, AbsoluteAngle]:
        self._advance(t_us)
        count = round(self._revs * self._encoder.pulses_per_revolution)
        return IncrementalSample(count, t_us), quantize_angle(self._deg, self._encoder)


def make_link(config: SimConfig):
    tr = config.transport
    if tr.kind == LOOPBACK:
        return LoopbackLink()
    if tr.kind == SCRIPTED:
        return ScriptedLink(tr.loss_pct, tr.reorder_pct, tr.duplicate_pct, tr.seed or 0)
    if tr.kind == UDP:
        return UdpLink(tr.address, tr.port)
    raise ValueError(f"unknown transport kind {tr.kind!r}")


class SessionEngine:
    """Single-timeline pipeline executor; tick() advances one sim_dt."""

    def __init__(self, config: SimConfig, rider, link=None):
        self.config = config
        self.rider = rider
        self.link = link if link is not None else make_link(config)
        self.stage = ControlStage(config.pipeline, config.encoder)
        self.receiver = Receiver()
        self.failsafe_timeout_us = default_failsafe_timeout_us(config.pipeline.control_period_us)
        self.pose = ScooterPose()
        self.events: list[LogEvent] = []
        self.t_us = 0
        self.commands_emitted = 0
        self._last_tick_count = 0
        self._window_angle: AbsoluteAngle | None = None
        self._seq = 0

    def _log(self, t_us: int, kind: str, payload: str) -> None:
        self.events.append(LogEvent(t_us, kind, payload))

    def tick(self) -> None:
        cfg = self.config
        sim_dt_us = cfg.kinematics.sim_dt_us
        self.t_us += sim_dt_us
        t = self.t_us
        try:
            inc, angle = self.rider.sample(t)
        except Exception as exc:
            raise SessionError(f"encoder emulation failed at t={t}: {exc}") from exc
        self._window_angle = angle
        self._log(t, EVENT_SAMPLE, f"{inc.tick_count} {angle.degrees:.6f}")

        if t % cfg.pipeline.control_period_us == 0:
            self._control_tick(t, inc)

        for arrival_t, payload in self.link.poll(t):
            self.receiver.receive(payload, arrival_t)
            self._log(arrival_t, EVENT_RX, payload.hex())

        self.receiver.failsafe_check(t, self.failsafe_timeout_us)
        active = self.receiver.active_command()
        try:
            self.pose = step(self.pose, active, cfg.kinematics, sim_dt_us * 1e-6)
        except Exception as exc:
            raise SessionError(f"kinematics failed at t={t}: {exc}") from exc
        self._log(t, EVENT_POSE, f"{self.pose.x:.6f} {self.pose.y:.6f} {self.pose.heading_deg:.6f}")

    def _control_tick(self, t: int, inc: IncrementalSample) -> None:
        cfg = self.config
        period_s = cfg.pipeline.control_period_us * 1e-6
        delta = inc.tick_count - self._last_tick_count
        self._last_tick_count = inc.tick_count
        try:
            rps = ticks_to_rps(delta, cfg.encoder, period_s)
            frame = encode_frame(rps, self._window_angle.degrees, self._seq & 0xFFFF)
            self._log(t, EVENT_UART, frame.hex())
            sensor = decode_frame(frame)
            cmd = self.stage.command_from(sensor.treadmill_rps, sensor.handlebar_deg)
            payload = encode_datagram(cmd, self._seq, t)
        except Exception as exc:
            raise SessionError(f"pipeline failed at t={t}: {exc}") from exc
        self._seq += 1
        self.commands_emitted += 1
        self.link.send(payload, t)
        self._log(t, EVENT_TX, payload.hex())

    def finish(self) -> None:
        """Flush in-flight datagrams so delivery accounting closes exactly."""
        self.link.flush(self.t_us)
        for arrival_t, payload in self.link.poll(self.t_us):
            self.receiver.receive(payload, arrival_t)
            self._log(arrival_t, EVENT_RX, payload.hex())
        self.link.close()

    def build_log(self) -> SessionLog:
        return SessionLog(self.config, list(self.events))


def run_session(
    config: SimConfig,
    profile: RideProfile,
    duration_s: float,
    time_scale: float = 1.0,
) -> SessionLog:
    """Execute a full scripted session and return its log.

    Fast-forward mode runs the simulated clock flat out and is bit-deterministic
    for a fixed (config, script, seed). Realtime mode paces the same timeline
    against the wall clock (time_scale > 1 compresses it, for tests).
    """
    if duration_s <= 0:
        raise ValueError(f"duration_s must be > 0, got {duration_s}")
    engine = SessionEngine(config, ScriptRider(profile, config.encoder))
    duration_us = round(duration_s * 1e6)
    n_ticks = duration_us // config.kinematics.sim_dt_us
    realtime = config.mode == MODE_REALTIME
    start = time.monotonic()
    for _ in range(n_ticks):
        engine.tick()
        if realtime:
            deadline = start + engine.t_us * 1e-6 / time_scale
            lag = deadline - time.monotonic()
            if lag > 0:
                time.sleep(lag)
    engine.finish()
    return engine.build_log()


def replay(log: SessionLog | str, config: SimConfig | None = None) -> list[tuple[int, ScooterPose]]:
    """Re-derive the pose trajectory from a session log.

    The log header binds the config; passing a different one raises
    RefusedConfigMismatch. Replay re-runs the receiver policy over the
    recorded RX datagrams and re-integrates the kinematics at each recorded
    pose instant, so the result is exactly the recorded trajectory.
    """
    if isinstance(log, str):
        log = parse_session_log(log)
    if config is not None and config != log.config:
        raise RefusedConfigMismatch("supplied config differs from the log header")
    cfg = log.config
    receiver = Receiver()
    timeout_us = default_failsafe_timeout_us(cfg.pipeline.control_period_us)
    dt_s = cfg.kinematics.sim_dt_us * 1e-6
    pose = ScooterPose()
    trajectory: list[tuple[int, ScooterPose]] = []
    for line_no, event in enumerate(log.events, start=1):
        if event.kind == EVENT_RX:
            try:
                receiver.receive(bytes.fromhex(event.payload), event.t_us)
            except ValueError:
                raise CorruptLog(f"bad hex payload {event.payload!r}", line_no) from None
        elif event.kind == EVENT_POSE:
            receiver.failsafe_check(event.t_us, timeout_us)
            pose = step(pose, receiver.active_command(), cfg.kinematics, dt_s)
            trajectory.append((event.t_us, pose))
    return trajectory


def verify_replay(log: SessionLog | str) -> bool:
    """True iff replay reproduces the recorded poses with identical formatting."""
    if isinstance(log, str):
        log = parse_session_log(log)
    recorded = [(t, f"{p.x:.6f} {p.y:.6f} {p.heading_deg:.6f}") for t, p in log.poses()]
    replayed = [(t, f"{p.x:.6f} {p.y:.6f} {p.heading_deg:.6f}") for t, p in replay(log)]
    return recorded == replayed
