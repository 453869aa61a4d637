"""Inlier-counting objective, single and multi-board."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import RigidTransform
from .validation import check_positive, check_scene

OUTLIER = -1


class PackedScene:
    """Flat arrays of (point, board) candidate pairs for vectorized scoring.

    Every point of scan i is paired with every board of image i, in board
    order, so the first passing pair of a point carries the lowest board
    index.
    """

    def __init__(self, scans, images, eps):
        scans, images = check_scene(scans, images)
        self.eps = check_positive("eps", eps)
        self.scan_sizes = np.array([len(s) for s in scans], dtype=int)
        self.points = np.concatenate(scans) if scans else np.zeros((0, 3))
        self.n_points = len(self.points)

        pair_point, pair_board, axes, norms, limits = [], [], [], [], []
        start = 0
        for scan, boards in zip(scans, images):
            for j in range(len(scan)):
                for k, b in enumerate(boards):
                    pair_point.append(start + j)
                    pair_board.append(k)
                    axes.append(b.axes)
                    norms.append(b.norms)
                    limits.append(b.limits(self.eps))
            start += len(scan)
        self.pair_point = np.array(pair_point, dtype=int)
        self.pair_board = np.array(pair_board, dtype=int)
        self.axes = np.array(axes, dtype=float).reshape(-1, 3, 3)
        self.norms = np.array(norms, dtype=float).reshape(-1, 3)
        self.limits = np.array(limits, dtype=float).reshape(-1, 3)
        # pair segments per point (only points that have at least one board)
        self.seg_points, self.seg_starts = np.unique(self.pair_point, return_index=True)

    @property
    def n_pairs(self) -> int:
        return len(self.pair_point)

    def offsets(self, t):
        """Laser points relative to each translation, shape (T, P, 3)."""
        return self.points[None, :, :] - np.asarray(t)[:, None, :]

    def project(self, R, t):
        """Signed board-axis coordinates of every pair under each transform.

        R: (T, 3, 3), t: (T, 3). Returns (T, K, 3) with entry [.., a] equal
        to axis_a . R^T (p - t).
        """
        x = self.offsets(t)
        pc = np.einsum("tpj,tjk->tpk", x, R)
        return np.einsum("tkj,kaj->tka", pc[:, self.pair_point], self.axes)

    def pair_pass(self, proj, slack=None):
        """Box membership per pair; `slack` (broadcastable to proj) widens every test."""
        lim = self.limits if slack is None else self.limits + slack
        return np.all(np.abs(proj - self.norms) < lim, axis=-1)

    def count(self, ok):
        """Number of points with at least one passing pair, per transform."""
        if ok.shape[-1] == 0:
            return np.zeros(ok.shape[:-1], dtype=int)
        hit = np.logical_or.reduceat(ok, self.seg_starts, axis=-1)
        return hit.sum(axis=-1)

    def labels(self, ok):
        """Board index per point for a single transform (OUTLIER if none)."""
        out = np.full(self.n_points, OUTLIER, dtype=int)
        idx = np.flatnonzero(ok)[::-1]  # reversed so the lowest board wins
        out[self.pair_point[idx]] = self.pair_board[idx]
        return out

    def split(self, per_point):
        return np.split(per_point, np.cumsum(self.scan_sizes)[:-1])

    def evaluate(self, R, t):
        """Objective at a batch of transforms; returns integer counts (T,)."""
        return self.count(self.pair_pass(self.project(R, t)))


@dataclass
class ObjectiveValue:
    count: int
    per_point: list  # per scan: int array, board index or OUTLIER

    def inlier_indices(self):
        return [np.flatnonzero(lab >= 0) for lab in self.per_point]


def evaluate_q(T: RigidTransform, scans, images, eps, packed: PackedScene | None = None):
    """Count laser points inside any board's inlier box under T."""
    packed = packed or PackedScene(scans, images, eps)
    ok = packed.pair_pass(packed.project(T.matrix[None], T.translation[None]))[0]
    per_point = packed.labels(ok)
    return ObjectiveValue(int(np.count_nonzero(per_point >= 0)), packed.split(per_point))
