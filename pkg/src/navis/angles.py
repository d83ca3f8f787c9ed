"""Degree-angle helpers shared by the encoder, pipeline and kinematics stages."""


def normalize_deg(degrees: float) -> float:
    """Fold an angle into [0, 360). Python's % already yields a non-negative result."""
    return degrees % 360.0


def wrap_delta_deg(delta: float) -> float:
    """Map a signed angle difference into (-180, 180].

    Exactly 180 (and -180) maps to +180: a fixed tie-break keeps the output
    deterministic at the wrap boundary.
    """
    d = delta % 360.0
    if d > 180.0:
        d -= 360.0
    return d


def clamp(value: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, value))
