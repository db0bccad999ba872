"""Orientations as unit quaternions with SO(3) semantics.

Quaternions are stored scalar-first and renormalized after every
composition, which keeps repeated products on the rotation group without
the drift a chain of 3x3 matrix products accumulates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class Orientation:
    """Proper rotation from the body-fixed frame to the space-fixed frame."""

    quaternion: tuple

    def __post_init__(self):
        q = np.asarray(self.quaternion, dtype=float)
        if q.shape != (4,):
            raise ValueError("quaternion must have four components")
        n = float(np.linalg.norm(q))
        if not math.isfinite(n) or abs(n - 1.0) > _NORM_TOL:
            raise ValueError(f"quaternion norm {n} is not 1 within {_NORM_TOL}")
        object.__setattr__(self, "quaternion", tuple(q / n))

    @classmethod
    def identity(cls) -> "Orientation":
        return cls((1.0, 0.0, 0.0, 0.0))

    @classmethod
    def from_axis_angle(cls, axis, angle: float) -> "Orientation":
        axis = np.asarray(axis, dtype=float)
        n = np.linalg.norm(axis)
        if n == 0:
            raise ValueError("rotation axis must be nonzero")
        axis = axis / n
        half = 0.5 * angle
        return cls((math.cos(half), *(math.sin(half) * axis)))

    @classmethod
    def rot_x(cls, angle: float) -> "Orientation":
        return cls.from_axis_angle((1.0, 0.0, 0.0), angle)

    @classmethod
    def rot_y(cls, angle: float) -> "Orientation":
        return cls.from_axis_angle((0.0, 1.0, 0.0), angle)

    @classmethod
    def rot_z(cls, angle: float) -> "Orientation":
        return cls.from_axis_angle((0.0, 0.0, 1.0), angle)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "Orientation":
        """Haar-uniform random rotation."""
        q = rng.normal(size=4)
        return cls(tuple(q / np.linalg.norm(q)))

    def compose(self, other: "Orientation") -> "Orientation":
        """Quaternion product self * other, i.e. R(self) @ R(other)."""
        w1, x1, y1, z1 = self.quaternion
        w2, x2, y2, z2 = other.quaternion
        q = (
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )
        return Orientation(q)

    def inverse(self) -> "Orientation":
        w, x, y, z = self.quaternion
        return Orientation((w, -x, -y, -z))

    def matrix(self) -> np.ndarray:
        """Rotation matrix R with R @ v_body = v_space."""
        w, x, y, z = self.quaternion
        return np.array([
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ])

    def symmetry_axis(self) -> np.ndarray:
        """Space-frame direction of the body e3 axis, m = R @ e3."""
        return self.matrix()[:, 2]

    def rotation_vector(self) -> np.ndarray:
        """Axis-angle vector (axis * angle, angle in [0, pi])."""
        w, x, y, z = self.quaternion
        if w < 0:  # canonical hemisphere, keeps angle in [0, pi]
            w, x, y, z = -w, -x, -y, -z
        v = np.array([x, y, z])
        s = np.linalg.norm(v)
        angle = 2.0 * math.atan2(s, w)
        if s < 1e-12:
            return 2.0 * v  # small-angle limit: q_vec ~ axis * angle / 2
        return v * (angle / s)

    def angle_to(self, other: "Orientation") -> float:
        """Geodesic rotation angle between two orientations (rad)."""
        dot = abs(sum(a * b for a, b in zip(self.quaternion, other.quaternion)))
        return 2.0 * math.acos(min(1.0, dot))


def relative_orientation(a: Orientation, b: Orientation) -> Orientation:
    """Relative rotation with R(result) = R(b)^T @ R(a)."""
    return b.inverse().compose(a)


def axis_angle_between(a: Orientation, b: Orientation, body=None) -> float:
    """Angle between the symmetry axes of two orientations, in [0, pi].

    Only meaningful for azimuthally symmetric bodies; if a body is given it
    is validated.
    """
    if body is not None and not body.azimuthally_symmetric:
        raise ValueError("axis angle is defined only for azimuthally "
                         "symmetric bodies")
    ma = a.symmetry_axis()
    mb = b.symmetry_axis()
    cross = np.linalg.norm(np.cross(ma, mb))
    return math.atan2(cross, float(ma @ mb))
