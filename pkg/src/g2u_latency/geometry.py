"""3D placement math for ground and aerial nodes."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CoincidentNodes, ConfigError


@dataclass(frozen=True)
class Position3D:
    """Node position in meters; ``z`` is the height above ground."""

    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        for v in (self.x, self.y, self.z):
            if not math.isfinite(v):
                raise ConfigError(f"non-finite coordinate in {self!r}")
        if self.z < 0:
            raise ConfigError(f"height must be >= 0, got z={self.z}")

    @property
    def airborne(self) -> bool:
        return self.z > 0

    def moved(self, *, x=None, y=None, z=None) -> "Position3D":
        return Position3D(
            self.x if x is None else x,
            self.y if y is None else y,
            self.z if z is None else z,
        )

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


def distance(a: Position3D, b: Position3D) -> float:
    return math.hypot(a.x - b.x, a.y - b.y, a.z - b.z)


def elevation_angle(a: Position3D, b: Position3D) -> float:
    """Elevation of the link ``a``-``b`` above the horizontal plane, in degrees.

    Uses ``|dz|`` so the result does not depend on argument order and
    air-to-air links are handled the same way as ground-to-air ones.
    """
    d = distance(a, b)
    if d == 0.0:
        raise CoincidentNodes(f"elevation undefined for coincident nodes at {a.as_tuple()}")
    ratio = min(1.0, abs(a.z - b.z) / d)
    return math.degrees(math.asin(ratio))
