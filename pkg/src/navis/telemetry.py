"""Command telemetry over an unreliable datagram link.

MotionCommands travel MCU -> world in fixed 28-byte datagrams (little-endian):

    offset  size  field
    0       4     magic       "NAVS"
    4       1     version     0x01
    5       4     seq         u32, monotonically increasing per sender
    9       8     t_us        u64 sender timestamp
    17      4     throttle    signed Q16.16
    21      4     steering    signed Q16.16 degrees
    25      1     flags       bit0 = failsafe-active
    26      2     crc         CRC-16/CCITT-FALSE over bytes 4..25

The receiver applies latest-seq-wins: stale or duplicated datagrams are
dropped, corrupt ones are counted, and a silence timeout produces a one-shot
throttle-zero override. Commands are absolute setpoints, so dropped data is
always preferable to stale data; nothing is retransmitted.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from .pipeline import MotionCommand
from .wire import (
    BadCrc,
    BadMagic,
    BadVersion,
    RangeExceeded,
    ShortFrame,
    WireError,
    crc16_ccitt_false,
    q16_decode,
    q16_encode,
)

DATAGRAM_LEN = 28
MAGIC = b"NAVS"
VERSION = 0x01
DEFAULT_PORT = 47157
FLAG_FAILSAFE = 0x01

_BODY = struct.Struct("<4sBIQiiB")  # magic, version, seq, t_us, throttle, steering, flags
_CRC = struct.Struct("<H")


@dataclass(frozen=True)
class Datagram:
    seq: int
    t_us: int
    command: MotionCommand
    failsafe: bool = False


def encode_datagram(cmd: MotionCommand, seq: int, t_us: int, failsafe: bool = False) -> bytes:
    """Serialize one command; raises RangeExceeded when cmd violates its ranges."""
    if not (-1.0 <= cmd.throttle <= 1.0):
        raise RangeExceeded(f"throttle {cmd.throttle} outside [-1, 1]")
    if not (-180.0 <= cmd.steering_delta_deg <= 180.0):
        raise RangeExceeded(f"steering {cmd.steering_delta_deg} outside [-180, 180]")
    if not 0 <= seq <= 0xFFFFFFFF:
        raise ValueError(f"seq must fit u32, got {seq}")
    if not 0 <= t_us <= 0xFFFFFFFFFFFFFFFF:
        raise ValueError(f"t_us must fit u64, got {t_us}")
    body = _BODY.pack(
        MAGIC,
        VERSION,
        seq,
        t_us,
        q16_encode(cmd.throttle),
        q16_encode(cmd.steering_delta_deg),
        FLAG_FAILSAFE if failsafe else 0,
    )
    return body + _CRC.pack(crc16_ccitt_false(body[4:]))


def decode_datagram(data: bytes) -> Datagram:
    """Parse and validate; out-of-range payloads are rejected like corruption."""
    if len(data) != DATAGRAM_LEN:
        raise ShortFrame(f"need exactly {DATAGRAM_LEN} bytes, got {len(data)}")
    if data[:4] != MAGIC:
        raise BadMagic(f"magic {data[:4]!r} != {MAGIC!r}")
    if data[4] != VERSION:
        raise BadVersion(f"version 0x{data[4]:02X} != 0x{VERSION:02X}")
    (crc,) = _CRC.unpack_from(data, 26)
    if crc != crc16_ccitt_false(data[4:26]):
        raise BadCrc("datagram checksum mismatch")
    _, _, seq, t_us, raw_throttle, raw_steering, flags = _BODY.unpack_from(data, 0)
    throttle = q16_decode(raw_throttle)
    steering = q16_decode(raw_steering)
    if not (-1.0 <= throttle <= 1.0):
        raise RangeExceeded(f"decoded throttle {throttle} outside [-1, 1]")
    if not (-180.0 <= steering <= 180.0):
        raise RangeExceeded(f"decoded steering {steering} outside [-180, 180]")
    return Datagram(seq, t_us, MotionCommand(throttle, steering), bool(flags & FLAG_FAILSAFE))


@dataclass
class LinkCounters:
    received: int = 0
    applied: int = 0
    stale_dropped: int = 0
    corrupt_dropped: int = 0


@dataclass
class ReceiverState:
    last_applied_seq: int | None = None
    last_command: MotionCommand | None = None
    last_arrival_t_us: int = 0
    counters: LinkCounters = field(default_factory=LinkCounters)
    failsafe_engaged: bool = False
    failsafe_count: int = 0
    last_latency_us: int | None = None


class Receiver:
    """Latest-seq-wins datagram sink with a silence failsafe."""

    def __init__(self) -> None:
        self.state = ReceiverState()

    def receive(self, data: bytes, arrival_t_us: int) -> MotionCommand | None:
        """Process one datagram; returns the command iff it was applied."""
        st = self.state
        st.counters.received += 1
        try:
            dgram = decode_datagram(data)
        except WireError:
            st.counters.corrupt_dropped += 1
            return None
        if st.last_applied_seq is not None and dgram.seq <= st.last_applied_seq:
            st.counters.stale_dropped += 1
            return None
        st.counters.applied += 1
        st.last_applied_seq = dgram.seq
        st.last_command = dgram.command
        st.last_arrival_t_us = arrival_t_us
        st.last_latency_us = arrival_t_us - dgram.t_us
        st.failsafe_engaged = False
        return dgram.command

    def failsafe_check(self, now_us: int, timeout_us: int) -> MotionCommand | None:
        """One-shot throttle-zero override after timeout_us of applied-datagram silence.

        Returns the override exactly once per silence period; a fresh applied
        datagram re-arms it. Steering holds its last value (the handlebar is
        physically persistent; only the stuck throttle is hazardous).
        """
        if timeout_us <= 0:
            raise ValueError(f"timeout_us must be > 0, got {timeout_us}")
        st = self.state
        if st.failsafe_engaged or now_us - st.last_arrival_t_us < timeout_us:
            return None
        st.failsafe_engaged = True
        st.failsafe_count += 1
        hold = st.last_command.steering_delta_deg if st.last_command else 0.0
        override = MotionCommand(0.0, hold)
        st.last_command = override
        return override

    def active_command(self) -> MotionCommand:
        """Command the world should hold right now ((0, 0) before any arrival)."""
        return self.state.last_command or MotionCommand(0.0, 0.0)


def default_failsafe_timeout_us(control_period_us: int) -> int:
    """Three missed control periods (471 ms at the stock cadence)."""
    return 3 * control_period_us
