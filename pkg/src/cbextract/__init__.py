"""Globally optimal checkerboard extraction from camera/laser-scan pairs."""

from .bnb import BnbConfig, ExtractionResult, extract, strict_gate_variant
from .bounds import SearchCell, cap_extremum, delta_loose, delta_tight, upper_bound
from .estimator import CheckerboardExtractor
from .geometry import Box3, angle_axis_to_matrix, angle_between, branch, matrix_to_angle_axis
from .model import (
    BoardObservation,
    BoardPose,
    DegeneratePoseError,
    RigidTransform,
    inlier_box_test,
    normals_from_pose,
)
from .objective import ObjectiveValue, evaluate_q

__all__ = [
    "BnbConfig", "ExtractionResult", "extract", "strict_gate_variant",
    "SearchCell", "cap_extremum", "delta_loose", "delta_tight", "upper_bound",
    "CheckerboardExtractor",
    "Box3", "angle_axis_to_matrix", "angle_between", "branch", "matrix_to_angle_axis",
    "BoardObservation", "BoardPose", "DegeneratePoseError", "RigidTransform",
    "inlier_box_test", "normals_from_pose",
    "ObjectiveValue", "evaluate_q",
]
__version__ = "0.1.0"
