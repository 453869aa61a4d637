"""Scene data: laser points, checkerboard observations and the inlier box."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import angle_axis_to_matrix, matrix_to_angle_axis

# An image observes zero or more boards; a scan is an (m, 3) array in the laser frame.
ImageObservation = list  # list[BoardObservation]

DEGENERATE_TOL = 1e-9


class DegeneratePoseError(ValueError):
    """A board plane passes through the camera center."""


@dataclass(frozen=True)
class RigidTransform:
    """Camera-to-laser transform: p_laser = R(rotvec) @ p_camera + translation."""

    rotvec: np.ndarray = field(default_factory=lambda: np.zeros(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "rotvec", np.asarray(self.rotvec, dtype=float).reshape(3))
        object.__setattr__(
            self, "translation", np.asarray(self.translation, dtype=float).reshape(3)
        )

    @classmethod
    def from_matrix(cls, R, t):
        return cls(matrix_to_angle_axis(R), t)

    @property
    def matrix(self) -> np.ndarray:
        return angle_axis_to_matrix(self.rotvec)

    def to_laser(self, pc):
        return np.asarray(pc) @ self.matrix.T + self.translation

    def to_camera(self, pl):
        return (np.asarray(pl) - self.translation) @ self.matrix


@dataclass(frozen=True)
class BoardPose:
    """Board frame -> camera frame: q_cam = R @ q_board + t."""

    R: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "R", np.asarray(self.R, dtype=float).reshape(3, 3))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float).reshape(3))


@dataclass(frozen=True)
class BoardObservation:
    """Checkerboard seen in one image.

    ``Nx``, ``Ny``, ``Nz`` lie along the board axes in the camera frame; each
    has length equal to the distance from the camera center to the board
    plane orthogonal to that axis. ``dx``, ``dy`` are the board half sizes.
    """

    Nx: np.ndarray
    Ny: np.ndarray
    Nz: np.ndarray
    dx: float
    dy: float

    def __post_init__(self):
        for name in ("Nx", "Ny", "Nz"):
            v = np.asarray(getattr(self, name), dtype=float).reshape(3)
            if not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("board half-dimensions must be positive")

    @property
    def norms(self) -> np.ndarray:
        return np.array([np.linalg.norm(self.Nx), np.linalg.norm(self.Ny), np.linalg.norm(self.Nz)])

    @property
    def axes(self) -> np.ndarray:
        """Unit axis directions as rows (x, y, z)."""
        N = np.stack([self.Nx, self.Ny, self.Nz])
        return N / self.norms[:, None]

    def limits(self, eps: float) -> np.ndarray:
        return np.array([self.dx + eps, self.dy + eps, eps])

    def rotated(self, R) -> "BoardObservation":
        """Same board with its axis vectors rotated about the camera center."""
        R = np.asarray(R, dtype=float)
        return BoardObservation(R @ self.Nx, R @ self.Ny, R @ self.Nz, self.dx, self.dy)


def normals_from_pose(pose: BoardPose, dx: float, dy: float) -> BoardObservation:
    """Build the N vectors of a board from its pose in the camera frame.

    Each axis is signed so that it points away from the camera, which makes
    its length the camera-to-plane distance.
    """
    N = []
    for k, name in enumerate("xyz"):
        e = pose.R[:, k]
        d = float(e @ pose.t)
        if abs(d) < DEGENERATE_TOL:
            raise DegeneratePoseError(
                f"board {name}-plane passes through the camera center (distance {d:.3g})"
            )
        N.append(np.sign(d) * e * abs(d))
    return BoardObservation(N[0], N[1], N[2], dx, dy)


def inlier_box_test(p, T: RigidTransform, board: BoardObservation, eps: float) -> bool:
    """True iff laser point p falls in the board's inlier box under T."""
    pc = T.to_camera(np.asarray(p, dtype=float))
    dev = np.abs(board.axes @ pc - board.norms)
    return bool(np.all(dev < board.limits(eps)))
