"""Low-level wire helpers: CRC-16/CCITT-FALSE and Q16.16 fixed point.

Both the UART frame and the UDP datagram codecs build on these. Values cross
the wire as signed 32-bit Q16.16 so that every platform sees the identical
1/65536-quantized number.
"""

Q16_SCALE = 65536
_I32_MIN = -(1 << 31)
_I32_MAX = (1 << 31) - 1


class WireError(Exception):
    """Base for every codec failure; decoders never raise anything else."""


class RangeExceeded(WireError, ValueError):
    """Value does not fit the declared field range."""


class ShortFrame(WireError):
    """Buffer shorter than the fixed frame length."""


class BadSync(WireError):
    """First byte is not the UART sync marker."""


class BadMagic(WireError):
    """Datagram does not start with the protocol magic."""


class BadVersion(WireError):
    """Unsupported protocol version byte."""


class BadCrc(WireError):
    """Checksum mismatch."""


def crc16_ccitt_false(data: bytes) -> int:
    """CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no xorout."""
    crc = 0xFFFF
    for b in data:
        crc ^= b << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = (crc << 1) ^ 0x1021
            else:
                crc <<= 1
            crc &= 0xFFFF
    return crc


def q16_encode(value: float) -> int:
    """Quantize a real number to a signed 32-bit Q16.16 raw integer."""
    raw = round(value * Q16_SCALE)
    if raw < _I32_MIN or raw > _I32_MAX:
        raise RangeExceeded(f"{value!r} outside Q16.16 range")
    return raw


def q16_decode(raw: int) -> float:
    """Exact inverse of q16_encode for in-range raw values (division is dyadic)."""
    return raw / Q16_SCALE
