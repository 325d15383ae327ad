from __future__ import annotations

import math
from dataclasses import dataclass

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by its min and max corners."""

    minimum: Vec3
    maximum: Vec3

    @classmethod
    def around(cls, center: Vec3, half_x: float, half_y: float, half_z: float) -> "Box":
        cx, cy, cz = center
        return cls((cx - half_x, cy - half_y, cz - half_z), (cx + half_x, cy + half_y, cz + half_z))

    def ray_entry(self, origin: Vec3, direction: Vec3, t_max: float = math.inf) -> float | None:
        """Slab test; distance along `direction` where the ray enters the box, or None."""
        t_min = 0.0
        for axis in range(3):
            d = direction[axis]
            o = origin[axis]
            lo = self.minimum[axis]
            hi = self.maximum[axis]
            if d == 0.0:
                if o < lo or o > hi:
                    return None
                continue
            inv = 1.0 / d
            t0 = (lo - o) * inv
            t1 = (hi - o) * inv
            if inv < 0:
                t0, t1 = t1, t0
            t_min = t0 if t0 > t_min else t_min
            t_max = t1 if t1 < t_max else t_max
            if t_max < t_min:
                return None
        return t_min

    def ray_exit(self, origin: Vec3, direction: Vec3) -> float:
        """Distance at which a ray starting inside the box leaves it."""
        t_exit = math.inf
        for axis in range(3):
            d = direction[axis]
            if d > 0:
                t_exit = min(t_exit, (self.maximum[axis] - origin[axis]) / d)
            elif d < 0:
                t_exit = min(t_exit, (self.minimum[axis] - origin[axis]) / d)
        return t_exit


def heading_degrees(dx: float, dy: float) -> float:
    """Counter-clockwise angle from +x, in (-180, 180]."""
    return math.degrees(math.atan2(dy, dx))


def direction_angles(direction: Vec3) -> tuple[float, float]:
    """(yaw, pitch) in degrees of a non-zero direction."""
    x, y, z = direction
    yaw = math.degrees(math.atan2(y, x))
    pitch = math.degrees(math.atan2(z, math.hypot(x, y)))
    return yaw, pitch


def direction_from_angles(yaw: float, pitch: float) -> Vec3:
    yaw_r = math.radians(yaw)
    pitch_r = math.radians(pitch)
    cos_p = math.cos(pitch_r)
    return (math.cos(yaw_r) * cos_p, math.sin(yaw_r) * cos_p, math.sin(pitch_r))
