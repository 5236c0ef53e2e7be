"""Small value types shared by the manifest and narrative models."""

from __future__ import annotations

import math
from dataclasses import dataclass

Vec2 = tuple[float, float]
Vec3 = tuple[float, float, float]


class InvalidField(ValueError):
    """Raised from ``__post_init__`` to pin an invariant failure on a field."""

    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(message)


def require(cond: bool, field_name: str, message: str) -> None:
    if not cond:
        raise InvalidField(field_name, message)


def finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


def normalize_yaw(yaw: float) -> float:
    """Map ``yaw`` into [-pi, pi); values already in range are returned untouched."""
    if -math.pi <= yaw < math.pi:
        return yaw
    wrapped = math.fmod(yaw + math.pi, 2.0 * math.pi)
    if wrapped < 0.0:
        wrapped += 2.0 * math.pi
    wrapped -= math.pi
    # fmod rounding can land exactly on +pi
    return -math.pi if wrapped >= math.pi else wrapped


@dataclass(frozen=True)
class Placement:
    """World position (meters), yaw about +Y (radians) and uniform scale."""

    position: Vec3 = (0.0, 0.0, 0.0)
    yaw: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        require(finite(*self.position), "position", "must be finite")
        require(finite(self.yaw), "yaw", "must be finite")
        require(finite(self.scale) and self.scale > 0, "scale", "must be > 0")
        object.__setattr__(self, "yaw", normalize_yaw(self.yaw))
