"""UART sensor-frame codec.

Fixed 14-byte frame carrying one (treadmill rev/s, handlebar degrees) sample
from the encoder board into the MCU stage, little-endian throughout:

    offset  size  field
    0       1     sync          0xAA
    1       1     version       0x01
    2       4     treadmill_rps signed Q16.16
    6       4     handlebar_deg signed Q16.16
    10      2     sample_seq    u16
    12      2     crc           CRC-16/CCITT-FALSE over bytes 1..11
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .wire import BadCrc, BadSync, BadVersion, ShortFrame, crc16_ccitt_false, q16_decode, q16_encode

FRAME_LEN = 14
SYNC = 0xAA
VERSION = 0x01

_BODY = struct.Struct("<BBiiH")  # sync, version, rps, deg, seq
_CRC = struct.Struct("<H")


@dataclass(frozen=True)
class SensorFrame:
    treadmill_rps: float
    handlebar_deg: float
    sample_seq: int


def encode_frame(rps: float, deg: float, seq: int) -> bytes:
    """Serialize one sensor sample; raises RangeExceeded outside Q16.16."""
    if not 0 <= seq <= 0xFFFF:
        raise ValueError(f"sample_seq must fit u16, got {seq}")
    body = _BODY.pack(SYNC, VERSION, q16_encode(rps), q16_encode(deg), seq)
    return body + _CRC.pack(crc16_ccitt_false(body[1:]))


def decode_frame(data: bytes) -> SensorFrame:
    """Parse and validate a frame; every failure is a distinct WireError subclass."""
    if len(data) != FRAME_LEN:
        raise ShortFrame(f"need exactly {FRAME_LEN} bytes, got {len(data)}")
    if data[0] != SYNC:
        raise BadSync(f"sync byte 0x{data[0]:02X} != 0x{SYNC:02X}")
    if data[1] != VERSION:
        raise BadVersion(f"version 0x{data[1]:02X} != 0x{VERSION:02X}")
    (crc,) = _CRC.unpack_from(data, 12)
    if crc != crc16_ccitt_false(data[1:12]):
        raise BadCrc("frame checksum mismatch")
    _, _, raw_rps, raw_deg, seq = _BODY.unpack_from(data, 0)
    return SensorFrame(q16_decode(raw_rps), q16_decode(raw_deg), seq)
