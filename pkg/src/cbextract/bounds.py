"""Upper bounds of the inlier count over a rotation x translation cell.

Two per-point slacks are available. ``loose`` encloses the spherical cap of
reachable board directions in a ball, giving one slack per point shared by
all three box tests. ``tight`` evaluates the extremes of the projection on
the cap itself, one slack per board axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .geometry import SQRT3, Box3, angle_axis_to_matrix, angle_between, cap_half_angle, chord
from .objective import PackedScene

MODES = ("loose", "tight")


@dataclass(frozen=True)
class SearchCell:
    rot_box: Box3
    trans_box: Box3
    upper: int | None = None
    center_q: int | None = None

    @property
    def rot_center(self):
        return self.rot_box.center

    @property
    def trans_center(self):
        return self.trans_box.center


class CapExtremum(NamedTuple):
    g_max: float
    g_min: float


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def cap_extremes(beta, r, alpha):
    """Max and min of r*cos(angle to x) over a cap of half-angle alpha.

    beta is the angle between the cap axis and x, r = |x|. Arrays broadcast.
    """
    lo = np.cos(beta - alpha)
    hi = np.cos(beta + alpha)
    g_max = np.where(beta <= alpha, r, r * np.maximum(lo, hi))
    g_min = np.where(beta >= np.pi - alpha, -r, r * np.minimum(lo, hi))
    return g_max, g_min


def rotation_slack(const, beta, r, alpha):
    """Largest |const - g| over the cap, where const is the value at the axis."""
    if np.all(alpha == 0):
        # collapsed rotation box: no slack, exactly
        return np.zeros(np.broadcast(const, beta, r).shape)
    g_max, g_min = cap_extremes(beta, r, alpha)
    return np.maximum(np.abs(const - g_min), np.abs(const - g_max))


def delta_loose(p, cell: SearchCell) -> float:
    r = np.linalg.norm(np.asarray(p, dtype=float) - cell.trans_center)
    return float(r * chord(cap_half_angle(cell.rot_box.half_len)) + SQRT3 * cell.trans_box.half_len)


def _check_unit(n):
    n = np.asarray(n, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-9:
        raise ValueError("N_dir must be a unit vector")
    return n


def cap_extremum(N_dir, p, cell: SearchCell) -> CapExtremum:
    """Extremes of (R n)^T (p - t_c) over R(v) with v in the cell's rotation box."""
    n = _check_unit(N_dir)
    x = np.asarray(p, dtype=float) - cell.trans_center
    r = np.linalg.norm(x)
    if r == 0.0:
        return CapExtremum(0.0, 0.0)
    beta = angle_between(angle_axis_to_matrix(cell.rot_center) @ n, x)
    g_max, g_min = cap_extremes(beta, r, cap_half_angle(cell.rot_box.half_len))
    return CapExtremum(float(g_max), float(g_min))


def delta_tight(N_dir, p, cell: SearchCell) -> float:
    n = _check_unit(N_dir)
    x = np.asarray(p, dtype=float) - cell.trans_center
    const = float((angle_axis_to_matrix(cell.rot_center) @ n) @ x)
    g = cap_extremum(n, p, cell)
    rot = 0.0 if cell.rot_box.half_len == 0 else max(abs(const - g.g_min), abs(const - g.g_max))
    return SQRT3 * cell.trans_box.half_len + rot


def batch_bounds(packed: PackedScene, R, t, rot_half, trans_half, mode="tight"):
    """Upper bounds and center values for T cells sharing the same half sizes.

    R: (T, 3, 3) center rotations, t: (T, 3) center translations.
    Returns (upper, center_q), both integer arrays of shape (T,).
    """
    _check_mode(mode)
    R = np.asarray(R, dtype=float)
    t = np.asarray(t, dtype=float)
    x = packed.offsets(t)  # (T, P, 3)
    pc = np.einsum("tpj,tjk->tpk", x, R)
    xk = x[:, packed.pair_point]  # (T, K, 3)
    proj = np.einsum("tkj,kaj->tka", pc[:, packed.pair_point], packed.axes)
    center_q = packed.count(packed.pair_pass(proj))

    alpha = cap_half_angle(rot_half)
    trans = SQRT3 * trans_half
    r = np.linalg.norm(xk, axis=-1)  # (T, K)
    if mode == "loose":
        slack = (r * chord(alpha) + trans)[..., None]
    else:
        a = np.einsum("tij,kaj->tkai", R, packed.axes)  # rotated unit axes
        cross = np.linalg.norm(np.cross(a, xk[:, :, None, :]), axis=-1)
        beta = np.arctan2(cross, proj)
        slack = trans + rotation_slack(proj, beta, r[..., None], alpha)
    upper = packed.count(packed.pair_pass(proj, slack))
    return upper, center_q


def upper_bound(cell: SearchCell, scans=None, images=None, eps=None, mode="tight",
                packed: PackedScene | None = None) -> int:
    """Integer upper bound of the inlier count over every transform in `cell`."""
    packed = packed or PackedScene(scans, images, eps)
    R = angle_axis_to_matrix(cell.rot_center)[None]
    upper, _ = batch_bounds(packed, R, cell.trans_center[None],
                            cell.rot_box.half_len, cell.trans_box.half_len, mode)
    return int(upper[0])
