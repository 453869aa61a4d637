"""scikit-learn style front end to the branch-and-bound search."""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .bnb import BnbConfig, extract
from .objective import PackedScene, evaluate_q
from .validation import check_scene


class CheckerboardExtractor(BaseEstimator):
    """Find the laser points that lie on the observed checkerboards.

    Parameters
    ----------
    eps : float, default=0.07
        Inlier box margin in meters.
    rot_half : float, default=pi/12
        Half side of the root rotation box (angle-axis, radians).
    trans_half : float, default=1.0
        Half side of the root translation box, meters.
    mode : {"tight", "loose"}, default="tight"
        Which per-point slack the upper bound uses.
    max_iter : int or None, default=None
        Stop after this many pop-and-expand iterations.
    stall : int or None, default=None
        Stop when the incumbent has not improved for this many iterations
        (only once it has reached ``min_inliers``).
    min_inliers : int, default=0
    push_rule : {"strictly_greater", "geq"}, default="strictly_greater"
    rot_center, trans_center : array-like of shape (3,) or None
        Centers of the root boxes; the origin when None.
    n_jobs : int, default=1
        Threads used to bound the 64 children of each expansion. Results do
        not depend on it.

    Attributes
    ----------
    transform_ : RigidTransform
        Best camera-to-laser transform found.
    n_inliers_ : int
    labels_ : list of ndarray
        Per scan, the board index of each point or -1 for outliers.
    inliers_ : list of ndarray
        Per scan, indices of inlier points.
    result_ : ExtractionResult
    """

    def __init__(self, eps=0.07, rot_half=math.pi / 12, trans_half=1.0, mode="tight",
                 max_iter=None, stall=None, min_inliers=0, push_rule="strictly_greater",
                 rot_center=None, trans_center=None, n_jobs=1):
        self.eps = eps
        self.rot_half = rot_half
        self.trans_half = trans_half
        self.mode = mode
        self.max_iter = max_iter
        self.stall = stall
        self.min_inliers = min_inliers
        self.push_rule = push_rule
        self.rot_center = rot_center
        self.trans_center = trans_center
        self.n_jobs = n_jobs

    def _config(self):
        return BnbConfig(
            eps=self.eps,
            init_rot_half=self.rot_half,
            init_trans_half=self.trans_half,
            mode=self.mode,
            max_iterations=self.max_iter,
            stall_window=self.stall,
            min_inliers=self.min_inliers,
            push_rule=self.push_rule,
            rot_center=tuple(np.zeros(3) if self.rot_center is None else self.rot_center),
            trans_center=tuple(np.zeros(3) if self.trans_center is None else self.trans_center),
        )

    def fit(self, scans, images):
        """Run the search on scans (list of (m_i, 3) arrays) and their images."""
        cfg = self._config()
        scans, images = check_scene(scans, images)
        result = extract(scans, images, cfg, n_jobs=self.n_jobs,
                         packed=PackedScene(scans, images, cfg.eps))
        self.result_ = result
        self.transform_ = result.best
        self.n_inliers_ = result.best_q
        self.labels_ = result.per_point
        self.inliers_ = result.inliers
        self.n_iter_ = result.iterations
        return self

    def predict(self, scans, images):
        """Board index per point under the fitted transform (-1: outlier)."""
        check_is_fitted(self, "transform_")
        return evaluate_q(self.transform_, scans, images, self.eps).per_point

    def fit_predict(self, scans, images):
        return self.fit(scans, images).labels_

    def score(self, scans, images):
        """Inlier count under the fitted transform."""
        check_is_fitted(self, "transform_")
        return evaluate_q(self.transform_, scans, images, self.eps).count
