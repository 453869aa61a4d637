"""Angle-axis rotation algebra and cubic boxes over the search space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

SQRT3 = np.sqrt(3.0)

# Child offsets of an octant split, in a fixed order (x slowest, z fastest).
_OCTANTS = np.array(
    [[sx, sy, sz] for sx in (-1.0, 1.0) for sy in (-1.0, 1.0) for sz in (-1.0, 1.0)]
)


def angle_axis_to_matrix(v):
    """Rodrigues' formula. Accepts a single vector (3,) or a stack (..., 3)."""
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v, axis=-1)[..., None, None]
    K = np.zeros(v.shape[:-1] + (3, 3))
    K[..., 0, 1] = -v[..., 2]
    K[..., 0, 2] = v[..., 1]
    K[..., 1, 0] = v[..., 2]
    K[..., 1, 2] = -v[..., 0]
    K[..., 2, 0] = -v[..., 1]
    K[..., 2, 1] = v[..., 0]
    small = theta < 1e-6
    safe = np.where(small, 1.0, theta)
    # sin(t)/t and (1-cos(t))/t^2, Taylor-expanded near zero
    a = np.where(small, 1.0 - theta**2 / 6.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - theta**2 / 24.0, (1.0 - np.cos(safe)) / safe**2)
    return np.eye(3) + a * K + b * (K @ K)


def matrix_to_angle_axis(R):
    return Rotation.from_matrix(np.asarray(R, dtype=float)).as_rotvec()


def rotation_angle(R):
    """Rotation angle of R from its trace, in [0, pi]."""
    c = (np.trace(np.asarray(R), axis1=-2, axis2=-1) - 1.0) / 2.0
    return np.arccos(np.clip(c, -1.0, 1.0))


def angle_between(u, w):
    """Angle between two nonzero 3-vectors, in [0, pi]."""
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.linalg.norm(u) == 0.0 or np.linalg.norm(w) == 0.0:
        raise ValueError("angle_between: zero-norm input")
    # atan2 form stays accurate near 0 and pi where arccos loses digits
    return float(np.arctan2(np.linalg.norm(np.cross(u, w)), np.dot(u, w)))


def cap_half_angle(rot_half):
    """Angular radius of the cap swept by R(v)n for v in a rotation box.

    sqrt(3) * half side, capped at pi (the whole sphere).
    """
    return np.minimum(SQRT3 * np.asarray(rot_half, dtype=float), np.pi)


def chord(angle):
    """Length of the chord subtending `angle` on the unit sphere."""
    return np.sqrt(2.0 * (1.0 - np.cos(angle)))


@dataclass(frozen=True)
class Box3:
    """Axis-aligned cube: per-axis |x_k - center_k| <= half_len."""

    center: np.ndarray
    half_len: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).reshape(3)
        object.__setattr__(self, "center", center)
        if not self.half_len >= 0:
            raise ValueError(f"half_len must be >= 0, got {self.half_len}")

    def contains(self, x, rtol=1e-12) -> bool:
        """Per-axis membership, with a relative slack for rounding in the split centers."""
        x = np.asarray(x, dtype=float)
        tol = rtol * max(1.0, float(np.max(np.abs(x))), float(np.max(np.abs(self.center))))
        return bool(np.all(np.abs(x - self.center) <= self.half_len + tol))

    @property
    def volume(self) -> float:
        return (2.0 * self.half_len) ** 3


def child_centers(center, half_len):
    """Centers of the eight octant children, shape (8, 3)."""
    return np.asarray(center, dtype=float) + 0.5 * half_len * _OCTANTS


def branch(box: Box3) -> list[Box3]:
    """Split a box into its eight octants, each with half the side length."""
    if box.half_len <= 0:
        raise ValueError("cannot branch a degenerate box (half_len == 0)")
    h = 0.5 * box.half_len
    return [Box3(c, h) for c in child_centers(box.center, box.half_len)]
