"""Small scene builders and samplers shared by the test modules."""

import numpy as np

from cbextract.geometry import angle_axis_to_matrix
from cbextract.model import BoardPose, RigidTransform, normals_from_pose


def small_scene(rng, n_scans=3, per_board=6, clutter=4, boards=(1, 1), T=None, noise=0.01):
    """Scans with points on posed boards under T plus random clutter.

    Returns (T, scans, images, truth) where truth[i][j] is the board index
    a point was drawn from, or -1 for clutter.
    """
    if T is None:
        T = RigidTransform(rng.uniform(-0.05, 0.05, 3), rng.uniform(-0.1, 0.1, 3))
    scans, images, truth = [], [], []
    for _ in range(n_scans):
        k = int(rng.integers(boards[0], boards[1] + 1))
        obs, pts, lab = [], [], []
        for b in range(k):
            pose = BoardPose(angle_axis_to_matrix(rng.uniform(-0.5, 0.5, 3)),
                             [rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), rng.uniform(1.5, 3.0)])
            obs.append(normals_from_pose(pose, 0.4, 0.3))
            uv = rng.uniform(-1, 1, size=(per_board, 2)) * [0.3, 0.2]
            pc = uv @ pose.R[:, :2].T + pose.t + rng.uniform(-noise, noise, size=(per_board, 1)) * pose.R[:, 2]
            pts.append(T.to_laser(pc))
            lab += [b] * per_board
        if clutter:
            pts.append(T.to_laser(rng.normal(size=(clutter, 3)) + [0, 0, 2.5]))
            lab += [-1] * clutter
        scans.append(np.vstack(pts) if pts else np.zeros((0, 3)))
        images.append(obs)
        truth.append(np.array(lab, dtype=int))
    return T, scans, images, truth


def sample_box(rng, center, half, n):
    return np.asarray(center) + rng.uniform(-half, half, size=(n, 3))


def sample_cap(rng, axis, alpha, n, rim_fraction=0.5):
    """Unit directions within angle alpha of `axis`; a share lies on the rim."""
    axis = np.asarray(axis, dtype=float) / np.linalg.norm(axis)
    u = np.cross(axis, [1.0, 0, 0] if abs(axis[0]) < 0.9 else [0, 1.0, 0])
    u /= np.linalg.norm(u)
    v = np.cross(axis, u)
    n_rim = int(n * rim_fraction)
    # uniform in area inside the cap, plus evenly spread rim directions
    cos_t = 1 - rng.uniform(0, 1, n - n_rim) * (1 - np.cos(alpha))
    theta = np.r_[np.arccos(np.clip(cos_t, -1, 1)), np.full(n_rim, alpha)]
    phi = np.r_[rng.uniform(0, 2 * np.pi, n - n_rim), np.linspace(0, 2 * np.pi, n_rim, endpoint=False)]
    return (np.cos(theta)[:, None] * axis
            + np.sin(theta)[:, None] * (np.cos(phi)[:, None] * u + np.sin(phi)[:, None] * v))
