"""Best-first branch-and-bound over (rotation box, translation box) cells."""

from __future__ import annotations

import heapq
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .bounds import MODES, batch_bounds
from .geometry import Box3, angle_axis_to_matrix, child_centers
from .model import RigidTransform
from .objective import PackedScene, evaluate_q
from .validation import check_positive

logger = logging.getLogger(__name__)

PUSH_RULES = ("strictly_greater", "geq")
TERMINATIONS = ("bound_met", "max_iterations", "stall", "queue_exhausted")

# cells smaller than this in both boxes are not split any further
MIN_HALF = 1e-7


@dataclass
class BnbConfig:
    eps: float = 0.07
    init_rot_half: float = math.pi / 12
    init_trans_half: float = 1.0
    mode: str = "tight"
    max_iterations: int | None = None
    stall_window: int | None = None
    min_inliers: int = 0
    push_rule: str = "strictly_greater"
    rot_center: tuple = (0.0, 0.0, 0.0)
    trans_center: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        check_positive("eps", self.eps)
        check_positive("init_rot_half", self.init_rot_half)
        check_positive("init_trans_half", self.init_trans_half)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.push_rule not in PUSH_RULES:
            raise ValueError(f"push_rule must be one of {PUSH_RULES}, got {self.push_rule!r}")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.stall_window is not None and self.stall_window < 1:
            raise ValueError("stall_window must be >= 1")


class TraceRecord(NamedTuple):
    iteration: int
    q_star: int  # incumbent after expanding the popped cell
    upper: int  # bound of the popped cell
    queue_size: int


class _Cell(NamedTuple):
    rot_center: np.ndarray
    trans_center: np.ndarray
    depth: int
    upper: int
    center_q: int


class CellQueue:
    """Max-queue on the upper bound; equal bounds pop in insertion order."""

    def __init__(self):
        self._heap = []
        self._seq = 0

    def push(self, cell: _Cell):
        heapq.heappush(self._heap, (-cell.upper, self._seq, cell))
        self._seq += 1

    def pop(self) -> _Cell:
        return heapq.heappop(self._heap)[2]

    @property
    def pushed(self) -> int:
        return self._seq

    def __len__(self):
        return len(self._heap)


@dataclass
class ExtractionResult:
    best: RigidTransform
    best_q: int
    per_point: list  # per scan: board index per point, -1 for outliers
    terminated_by: str
    trace: list = field(default_factory=list)
    iterations: int = 0
    cells_pushed: int = 0

    @property
    def inliers(self):
        """Per-scan arrays of inlier point indices."""
        return [np.flatnonzero(lab >= 0) for lab in self.per_point]

    @property
    def correspondences(self):
        """Per-scan lists of (point index, board index) pairs."""
        return [[(int(j), int(lab[j])) for j in np.flatnonzero(lab >= 0)] for lab in self.per_point]

    def first_iteration_reaching(self, q):
        """First iteration whose expansion brought Q* to at least q, or None."""
        for rec in self.trace:
            if rec.q_star >= q:
                return rec.iteration
        return None


def _evaluate_children(packed, rot_c, trans_c, rot_half, trans_half, mode, pool):
    # child order: rotation child k outer, translation child l inner
    R = np.repeat(angle_axis_to_matrix(rot_c), len(trans_c), axis=0)
    t = np.tile(trans_c, (len(rot_c), 1))
    if pool is None:
        return batch_bounds(packed, R, t, rot_half, trans_half, mode)
    chunks = np.array_split(np.arange(len(R)), pool._max_workers)
    parts = list(pool.map(
        lambda idx: batch_bounds(packed, R[idx], t[idx], rot_half, trans_half, mode),
        [c for c in chunks if len(c)],
    ))
    return (np.concatenate([u for u, _ in parts]), np.concatenate([q for _, q in parts]))


def extract(scans, images, cfg: BnbConfig | None = None, n_jobs: int = 1,
            packed: PackedScene | None = None) -> ExtractionResult:
    """Globally maximize the inlier count over the root cell.

    Terminates with ``bound_met`` once the best remaining bound equals the
    incumbent, which certifies the incumbent as the global optimum.
    """
    cfg = cfg or BnbConfig()
    packed = packed or PackedScene(scans, images, cfg.eps)

    rot0 = np.asarray(cfg.rot_center, dtype=float)
    trans0 = np.asarray(cfg.trans_center, dtype=float)

    def finish(best, q, why, trace, it, queue):
        value = evaluate_q(best, None, None, cfg.eps, packed=packed)
        assert value.count == q
        return ExtractionResult(best, q, value.per_point, why, trace, it, queue.pushed)

    queue = CellQueue()
    if packed.n_points == 0:
        return finish(RigidTransform(rot0, trans0), 0, "queue_exhausted", [], 0, queue)

    upper, center_q = batch_bounds(packed, angle_axis_to_matrix(rot0)[None], trans0[None],
                                   cfg.init_rot_half, cfg.init_trans_half, cfg.mode)
    q_star = int(center_q[0])
    best = (rot0, trans0)
    queue.push(_Cell(rot0, trans0, 0, int(upper[0]), q_star))

    trace = []
    iteration = 0
    last_gain = 0
    terminated_by = "queue_exhausted"
    greater_equal = cfg.push_rule == "geq"
    pool = ThreadPoolExecutor(n_jobs) if n_jobs > 1 else None
    try:
        while queue:
            if cfg.max_iterations is not None and iteration >= cfg.max_iterations:
                terminated_by = "max_iterations"
                break
            cell = queue.pop()
            iteration += 1
            if cell.upper <= q_star:
                trace.append(TraceRecord(iteration, q_star, cell.upper, len(queue)))
                terminated_by = "bound_met"
                break

            rot_half = cfg.init_rot_half / 2.0**cell.depth
            trans_half = cfg.init_trans_half / 2.0**cell.depth
            if rot_half >= MIN_HALF or trans_half >= MIN_HALF:
                rot_c = child_centers(cell.rot_center, rot_half)
                trans_c = child_centers(cell.trans_center, trans_half)
                ups, qs = _evaluate_children(packed, rot_c, trans_c, rot_half / 2,
                                             trans_half / 2, cfg.mode, pool)
                # a child region lies inside its parent, so the parent bound also holds
                ups = np.minimum(ups, cell.upper)
                n_t = len(trans_c)
                for c in range(len(ups)):
                    u, q = int(ups[c]), int(qs[c])
                    if u > q_star or (greater_equal and u == q_star):
                        queue.push(_Cell(rot_c[c // n_t], trans_c[c % n_t], cell.depth + 1, u, q))
                        if q > q_star:
                            q_star = q
                            best = (rot_c[c // n_t], trans_c[c % n_t])
                            last_gain = iteration
            trace.append(TraceRecord(iteration, q_star, cell.upper, len(queue)))
            if iteration % 100 == 0:
                logger.debug("iter %d: Q*=%d Qhat=%d queue=%d", iteration, q_star, cell.upper, len(queue))

            if (cfg.stall_window is not None and q_star >= cfg.min_inliers
                    and iteration - last_gain >= cfg.stall_window):
                terminated_by = "stall"
                break
    finally:
        if pool is not None:
            pool.shutdown()

    return finish(RigidTransform(*best), q_star, terminated_by, trace, iteration, queue)


def strict_gate_variant(scans, images, cfg: BnbConfig | None = None, push_rule="strictly_greater",
                        **kwargs) -> ExtractionResult:
    """Run `extract` with an explicit pruning comparison for pushed children."""
    cfg = cfg or BnbConfig()
    cfg = BnbConfig(**{**cfg.__dict__, "push_rule": push_rule})
    return extract(scans, images, cfg, **kwargs)


def root_cell(cfg: BnbConfig):
    """Root (rotation box, translation box) pair of a configuration."""
    return (Box3(cfg.rot_center, cfg.init_rot_half), Box3(cfg.trans_center, cfg.init_trans_half))
