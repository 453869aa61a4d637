"""Synthetic 2D-scanner scenes: a triangular room and posed checkerboards.

The laser frame has x forward, y left and z up; the scanner sweeps the z = 0
plane. Two vertical walls form a wedge in front of the scanner: both are
``wall_distance`` from the scanner and meet on the x axis at
``apex_distance``. Board poses are given in the camera frame.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .geometry import angle_axis_to_matrix
from .model import BoardObservation, BoardPose, RigidTransform, normals_from_pose

BOARD = 1
WALL = 0
BUNDLED_POSES = "board_poses.json"


def _default_gt():
    return RigidTransform([0.0, np.deg2rad(10.0), 0.0], [-0.75, -0.2, 0.5])


@dataclass
class SynthConfig:
    gt: RigidTransform = field(default_factory=_default_gt)
    fan_start_deg: float = -70.0
    fan_stop_deg: float = 70.0
    fan_step_deg: float = 2.0
    wall_distance: float = 5.0
    apex_distance: float = 8.0
    board_width: float = 1.5  # along the board y axis (horizontal)
    board_height: float = 1.5  # along the board x axis (vertical)
    range_noise: float = 0.02
    normal_noise_deg: float = 1.0
    seed: int = 10

    def __post_init__(self):
        if not 0 < self.wall_distance < self.apex_distance:
            raise ValueError("need 0 < wall_distance < apex_distance")
        if self.fan_step_deg <= 0 or self.fan_stop_deg < self.fan_start_deg:
            raise ValueError("invalid ray fan")
        if self.range_noise < 0 or self.normal_noise_deg < 0:
            raise ValueError("noise bounds must be non-negative")
        if self.board_width <= 0 or self.board_height <= 0:
            raise ValueError("board dimensions must be positive")

    @property
    def ray_angles(self):
        n = int(round((self.fan_stop_deg - self.fan_start_deg) / self.fan_step_deg)) + 1
        return np.deg2rad(self.fan_start_deg + self.fan_step_deg * np.arange(n))

    @property
    def wall_normals(self):
        """Unit normals (2D, scan plane) of the two walls."""
        g = np.arccos(self.wall_distance / self.apex_distance)
        return np.array([[np.cos(g), np.sin(g)], [np.cos(g), -np.sin(g)]])

    @property
    def half_dims(self):
        return self.board_height / 2.0, self.board_width / 2.0


@dataclass
class SynthScene:
    scans: list  # (m_i, 3) arrays in the laser frame
    images: list  # list of lists of BoardObservation
    labels: list  # per scan: BOARD or WALL per point
    board_index: list  # per scan: index of the board hit, -1 for walls
    gt: RigidTransform
    wall_margin: float = np.inf  # smallest board-box excess of a wall point at gt

    @property
    def n_points(self):
        return sum(len(s) for s in self.scans)

    @property
    def n_board_points(self):
        return int(sum((b >= 0).sum() for b in self.board_index))


def wall_intersection(ray, cfg: SynthConfig) -> float:
    """Range along a unit scan-plane ray to the nearest wall."""
    ray = np.asarray(ray, dtype=float)[:2]
    facing = cfg.wall_normals @ ray
    if not np.any(facing > 0):
        raise ValueError("ray does not hit any wall")
    with np.errstate(divide="ignore"):
        ranges = np.where(facing > 0, cfg.wall_distance / facing, np.inf)
    return float(ranges.min())


def _axis_rotation(axis, angle):
    v = np.zeros(3)
    v[axis] = angle
    return angle_axis_to_matrix(v)


def _ray_board_range(d, R_bl, t_bl, dx, dy):
    """Range along unit ray d to the board, or inf if missed."""
    n = R_bl[:, 2]
    denom = n @ d
    if abs(denom) < 1e-12:
        return np.inf
    s = (n @ t_bl) / denom
    if s <= 0:
        return np.inf
    u, v = R_bl[:, :2].T @ (s * d - t_bl)
    return s if (abs(u) <= dx and abs(v) <= dy) else np.inf


def _box_excess(pc, board: BoardObservation, eps=0.0):
    """How far outside the inlier box a camera-frame point is (<= 0 inside)."""
    dev = np.abs(board.axes @ pc - board.norms)
    return float(np.max(dev - board.limits(eps)))


def generate(cfg: SynthConfig, poses) -> SynthScene:
    """Cast the ray fan once per board pose and build the observations.

    One board per image. RNG stream order per image: one range draw per
    ray, then three normal-noise angles (camera x, y, z).
    """
    rng = np.random.default_rng(cfg.seed)
    dx, dy = cfg.half_dims
    Phi, Delta = cfg.gt.matrix, cfg.gt.translation
    angles = cfg.ray_angles
    scans, images, labels, board_index = [], [], [], []
    wall_margin = np.inf
    for pose in poses:
        R_bl = Phi @ pose.R
        t_bl = Phi @ pose.t + Delta
        pts = np.zeros((len(angles), 3))
        hit = np.full(len(angles), -1, dtype=int)
        noise = rng.uniform(-cfg.range_noise, cfg.range_noise, size=len(angles))
        for j, th in enumerate(angles):
            d = np.array([np.cos(th), np.sin(th), 0.0])
            r_wall = wall_intersection(d[:2], cfg)
            r_board = _ray_board_range(d, R_bl, t_bl, dx, dy)
            if r_board <= r_wall + 1e-9:
                r, hit[j] = r_board, 0
            else:
                r = r_wall
            pts[j] = (r + noise[j]) * d
        a = np.deg2rad(rng.uniform(-cfg.normal_noise_deg, cfg.normal_noise_deg, size=3))
        R_noise = _axis_rotation(0, a[0]) @ _axis_rotation(1, a[1]) @ _axis_rotation(2, a[2])
        obs = normals_from_pose(pose, dx, dy)
        for j in np.flatnonzero(hit < 0):
            # noise-free wall point against the true board
            pc = cfg.gt.to_camera(pts[j] - noise[j] * pts[j] / np.linalg.norm(pts[j]))
            wall_margin = min(wall_margin, _box_excess(pc, obs))
        scans.append(pts)
        images.append([obs.rotated(R_noise)])
        labels.append(np.where(hit >= 0, BOARD, WALL))
        board_index.append(hit)
    return SynthScene(scans, images, labels, board_index, cfg.gt, wall_margin)


def poses_from_dicts(items):
    return [BoardPose(d["R"], d["t"]) for d in items]


def load_poses(path=None):
    """Board poses from a JSON file; the bundled six-pose set by default."""
    if path is None:
        text = resources.files("cbextract.data").joinpath(BUNDLED_POSES).read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    data = json.loads(text)
    items = data["poses"] if isinstance(data, dict) else data
    return poses_from_dicts(items)


def pose_in_laser_frame(center, yaw_deg, tilt_deg=0.0, roll_deg=0.0, gt: RigidTransform | None = None):
    """Camera-frame BoardPose for a board placed in the laser frame.

    The board faces back along -x rotated by `yaw_deg` about z, then tilted
    about its horizontal axis and rolled about its normal.
    """
    gt = gt or _default_gt()
    psi = np.deg2rad(yaw_deg)
    z = -np.array([np.cos(psi), np.sin(psi), 0.0])
    x = np.array([0.0, 0.0, 1.0])
    y = np.cross(z, x)
    R_bl = np.column_stack([x, y, z])
    R_bl = R_bl @ _axis_rotation(1, np.deg2rad(tilt_deg)) @ _axis_rotation(2, np.deg2rad(roll_deg))
    Phi = gt.matrix
    return BoardPose(Phi.T @ R_bl, Phi.T @ (np.asarray(center, dtype=float) - gt.translation))
