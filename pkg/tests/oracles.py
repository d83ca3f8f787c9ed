"""Independent reference implementations the tests check the package against.

Each oracle deliberately takes a different route than the code under test:
the CRC is table-driven (the package is bitwise), the angle wrap is iterative
(the package uses modulo), the receiver oracle sorts by sequence number
instead of streaming, and the turn oracle is the closed-form circle.
"""

import math


def _make_crc_table() -> list[int]:
    table = []
    for byte in range(256):
        reg = byte << 8
        for _ in range(8):
            reg = ((reg << 1) ^ 0x1021) & 0xFFFF if reg & 0x8000 else (reg << 1) & 0xFFFF
        table.append(reg)
    return table


_CRC_TABLE = _make_crc_table()


def crc16_reference(data: bytes) -> int:
    """Table-driven CRC-16/CCITT-FALSE."""
    crc = 0xFFFF
    for b in data:
        crc = ((crc << 8) & 0xFFFF) ^ _CRC_TABLE[(crc >> 8) ^ b]
    return crc


def wrap_reference(delta: float) -> float:
    """Brute-force wrap into (-180, 180] by repeated +/-360."""
    while delta > 180.0:
        delta -= 360.0
    while delta <= -180.0:
        delta += 360.0
    return delta


def latest_seq_reference(delivered: list[tuple[int, object]]) -> object | None:
    """Final command under latest-seq-wins: sort by seq, apply in order."""
    winner = None
    for _, cmd in sorted(delivered, key=lambda d: d[0]):
        winner = cmd
    return winner


def constant_turn_pose(x0: float, y0: float, h0_deg: float, v: float, rate_deg_s: float, t: float):
    """Closed-form pose after t seconds at constant speed and turn rate."""
    h0 = math.radians(h0_deg)
    w = math.radians(rate_deg_s)
    if w == 0.0:
        return x0 + v * math.cos(h0) * t, y0 + v * math.sin(h0) * t, h0_deg
    r = v / w
    h1 = h0 + w * t
    x = x0 + r * (math.sin(h1) - math.sin(h0))
    y = y0 - r * (math.cos(h1) - math.cos(h0))
    return x, y, math.degrees(h1) % 360.0
