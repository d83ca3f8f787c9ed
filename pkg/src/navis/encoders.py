"""Emulated treadmill and handlebar sensors.

Two devices are modeled: an incremental quadrature encoder on the treadmill
roller (relative motion decoded from Gray-code phase transitions) and an
absolute encoder on the handlebar (direct angle readout, quantized to its
resolution step).

The ride emulator stands in for the physical rig: a time-ordered script of
(treadmill rev/s, handlebar angle) setpoints is interpolated piecewise-linearly
and sampled on an injected clock.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .angles import normalize_deg


class InvalidTransition(ValueError):
    """Quadrature phase jumped diagonally (both bits flipped: edges were missed)."""


class NonPositiveInterval(ValueError):
    """A rate computation was asked for over dt <= 0."""


class UnorderedProfile(ValueError):
    """Ride script setpoint times are not strictly increasing."""


@dataclass(frozen=True)
class QuadraturePhase:
    """One two-bit quadrature state (levels of channel A and B)."""

    a: int
    b: int

    def __post_init__(self) -> None:
        if self.a not in (0, 1) or self.b not in (0, 1):
            raise ValueError(f"phase levels must be 0 or 1, got a={self.a} b={self.b}")


# Forward rotation cycles 00 -> 10 -> 11 -> 01 -> 00.
FORWARD_ORDER = (
    QuadraturePhase(0, 0),
    QuadraturePhase(1, 0),
    QuadraturePhase(1, 1),
    QuadraturePhase(0, 1),
)
_PHASE_INDEX = {p: i for i, p in enumerate(FORWARD_ORDER)}


@dataclass(frozen=True)
class IncrementalSample:
    """Cumulative treadmill tick count at time t (microseconds since session start)."""

    tick_count: int
    t: int


@dataclass(frozen=True)
class AbsoluteAngle:
    """Handlebar angle in degrees, always normalized into [0, 360)."""

    degrees: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "degrees", normalize_deg(self.degrees))


@dataclass(frozen=True)
class EncoderConfig:
    pulses_per_revolution: int = 600
    angle_resolution_deg: float = 0.1

    def __post_init__(self) -> None:
        if self.pulses_per_revolution < 1:
            raise ValueError("pulses_per_revolution must be >= 1")
        if self.angle_resolution_deg <= 0:
            raise ValueError("angle_resolution_deg must be > 0")
        # The resolution step must tile the full circle.
        steps = 360.0 / self.angle_resolution_deg
        if abs(steps - round(steps)) * self.angle_resolution_deg > 1e-9:
            raise ValueError(f"angle_resolution_deg {self.angle_resolution_deg} does not divide 360")


def quadrature_step(prev: QuadraturePhase, next: QuadraturePhase) -> int:
    """Decode one phase transition into a signed tick.

    +1 for a forward Gray-code step, -1 for a backward step, 0 when the phase
    did not change. A diagonal jump (both bits flip) means two edges were
    missed and raises InvalidTransition.
    """
    diff = (_PHASE_INDEX[next] - _PHASE_INDEX[prev]) % 4
    if diff == 0:
        return 0
    if diff == 1:
        return 1
    if diff == 3:
        return -1
    raise InvalidTransition(f"{prev} -> {next} flips both channels")


def phase_of(tick_count: int) -> QuadraturePhase:
    """Phase the encoder outputs when its cumulative count is tick_count."""
    return FORWARD_ORDER[tick_count % 4]


def ticks_to_rps(delta_ticks: int, config: EncoderConfig, dt: float) -> float:
    """Convert a tick delta over dt seconds to revolutions per second (signed)."""
    if dt <= 0:
        raise NonPositiveInterval(f"dt must be > 0, got {dt}")
    return delta_ticks / (config.pulses_per_revolution * dt)


def quantize_angle(degrees: float, config: EncoderConfig) -> AbsoluteAngle:
    """Snap an angle to the absolute encoder's resolution grid, then normalize."""
    res = config.angle_resolution_deg
    return AbsoluteAngle(round(degrees / res) * res)


@dataclass(frozen=True)
class Setpoint:
    t_us: int
    rps: float
    handlebar_deg: float


class RideProfile:
    """Piecewise-linear ride script.

    Between setpoints both channels interpolate linearly; before the first and
    after the last setpoint the boundary value holds. Handlebar values may run
    outside [0, 360) in a script (e.g. 350 -> 370 to steer through the wrap);
    they are normalized only at sampling time.
    """

    def __init__(self, setpoints: Sequence[Setpoint]):
        for prev, cur in zip(setpoints, setpoints[1:]):
            if cur.t_us <= prev.t_us:
                raise UnorderedProfile(f"setpoint times must strictly increase ({prev.t_us} then {cur.t_us})")
        self._points = list(setpoints)
        # Cumulative revolutions at each knot; the integral of a piecewise-linear
        # rate is evaluated in closed form so emitted ticks carry no drift.
        self._revs_at_knot = [0.0]
        for prev, cur in zip(self._points, self._points[1:]):
            dt_s = (cur.t_us - prev.t_us) * 1e-6
            self._revs_at_knot.append(self._revs_at_knot[-1] + 0.5 * (prev.rps + cur.rps) * dt_s)

    def __len__(self) -> int:
        return len(self._points)

    @property
    def setpoints(self) -> list[Setpoint]:
        return list(self._points)

    @classmethod
    def from_text(cls, text: str) -> "RideProfile":
        """Parse the line-oriented script format: `t_us rps handlebar_deg`, # comments."""
        points = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 3:
                raise ValueError(f"ride script line {lineno}: expected 't_us rps handlebar_deg', got {raw!r}")
            points.append(Setpoint(int(fields[0]), float(fields[1]), float(fields[2])))
        return cls(points)

    def _segment(self, t_us: int) -> int:
        """Index of the setpoint at or before t_us (-1 when t_us precedes the script)."""
        lo, hi = 0, len(self._points) - 1
        if t_us < self._points[0].t_us:
            return -1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self._points[mid].t_us <= t_us:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def _interp(self, t_us: int, field: str) -> float:
        i = self._segment(t_us)
        if i < 0:
            return getattr(self._points[0], field)
        if i == len(self._points) - 1:
            return getattr(self._points[-1], field)
        p, q = self._points[i], self._points[i + 1]
        frac = (t_us - p.t_us) / (q.t_us - p.t_us)
        return getattr(p, field) + frac * (getattr(q, field) - getattr(p, field))

    def rps_at(self, t_us: int) -> float:
        return self._interp(t_us, "rps")

    def handlebar_at(self, t_us: int) -> float:
        return self._interp(t_us, "handlebar_deg")

    def revs_until(self, t_us: int) -> float:
        """Exact cumulative treadmill revolutions over [0, t_us].

        Rate is held constant outside the scripted span, so the integral
        extends linearly before the first and after the last knot.
        """
        lead = self._points[0].t_us * 1e-6 * self._points[0].rps
        i = self._segment(t_us)
        if i < 0:
            return t_us * 1e-6 * self._points[0].rps
        if i == len(self._points) - 1:
            tail_s = (t_us - self._points[-1].t_us) * 1e-6
            return lead + self._revs_at_knot[-1] + tail_s * self._points[-1].rps
        p = self._points[i]
        dt_s = (t_us - p.t_us) * 1e-6
        r = self.rps_at(t_us)
        return lead + self._revs_at_knot[i] + 0.5 * (p.rps + r) * dt_s


def emulate_ride(
    profile: RideProfile,
    config: EncoderConfig,
    clock: Iterable[int],
) -> Iterator[tuple[IncrementalSample, AbsoluteAngle]]:
    """Sample the emulated sensors at each instant of the injected clock.

    Yields one (IncrementalSample, AbsoluteAngle) pair per clock tick. Tick
    counts come from rounding the closed-form revolution integral, so decoded
    rev/s over any window tracks the script to within one tick quantum. An
    empty profile produces an empty stream.
    """
    if len(profile) == 0:
        return
    ppr = config.pulses_per_revolution
    last_t = None
    for t_us in clock:
        if last_t is not None and t_us <= last_t:
            raise ValueError(f"clock must strictly increase ({last_t} then {t_us})")
        last_t = t_us
        count = round(profile.revs_until(t_us) * ppr)
        yield IncrementalSample(count, t_us), quantize_angle(profile.handlebar_at(t_us), config)


def sample_clock(period_us: int, duration_us: int) -> Iterator[int]:
    """Simulated time source: ticks at period_us, starting one period in."""
    if period_us <= 0:
        raise NonPositiveInterval(f"period_us must be > 0, got {period_us}")
    t = period_us
    while t <= duration_us:
        yield t
        t += period_us
