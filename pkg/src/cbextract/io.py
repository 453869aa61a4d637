"""Scene and result files: versioned JSON, one object per file.

Floats are written with ``repr`` precision, so reading a file back gives
bit-identical arrays. Angles are stored in radians.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .bnb import TERMINATIONS, ExtractionResult, TraceRecord
from .model import BoardObservation, BoardPose, RigidTransform, normals_from_pose

SCENE_FORMAT = "cbextract-scene"
RESULT_FORMAT = "cbextract-result"
VERSION = 1


class FormatError(ValueError):
    """A file is well-formed JSON but not a valid scene or result."""


def _floats(a):
    return np.asarray(a, dtype=float).tolist()


def _transform_dict(T: RigidTransform):
    return {"rotvec": _floats(T.rotvec), "translation": _floats(T.translation)}


def _transform_from(d):
    try:
        return RigidTransform(d["rotvec"], d["translation"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad transform: {exc}") from exc


def _check_header(data, kind):
    if not isinstance(data, dict) or data.get("format") != kind:
        raise FormatError(f"not a {kind} file")
    if data.get("version") != VERSION:
        raise FormatError(f"unsupported {kind} version {data.get('version')!r}")


@dataclass
class SceneFile:
    scans: list  # (m_i, 3) arrays, meters
    images: list  # per image, list of BoardObservation
    labels: list | None = None  # per scan: board index per point, -1 for background
    gt: RigidTransform | None = None

    def __post_init__(self):
        if len(self.scans) != len(self.images):
            raise FormatError(f"{len(self.scans)} scans but {len(self.images)} images")
        if self.labels is not None:
            if len(self.labels) != len(self.scans):
                raise FormatError("labels must have one entry per scan")
            for i, (lab, scan) in enumerate(zip(self.labels, self.scans)):
                if len(lab) != len(scan):
                    raise FormatError(f"scan {i}: {len(scan)} points but {len(lab)} labels")

    @classmethod
    def from_scene(cls, scene):
        """From a synth.SynthScene."""
        return cls(scene.scans, scene.images, [np.asarray(b) for b in scene.board_index], scene.gt)

    def to_dict(self):
        out = {
            "format": SCENE_FORMAT,
            "version": VERSION,
            "scans": [_floats(s) for s in self.scans],
            "images": [[_board_dict(b) for b in boards] for boards in self.images],
        }
        if self.labels is not None:
            out["labels"] = [np.asarray(lab, dtype=int).tolist() for lab in self.labels]
        if self.gt is not None:
            out["gt"] = _transform_dict(self.gt)
        return out

    @classmethod
    def from_dict(cls, data):
        _check_header(data, SCENE_FORMAT)
        try:
            scans = [np.asarray(s, dtype=float).reshape(-1, 3) for s in data["scans"]]
            images = [[_board_from(b) for b in boards] for boards in data["images"]]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"bad scene: {exc}") from exc
        labels = data.get("labels")
        if labels is not None:
            labels = [np.asarray(lab, dtype=int) for lab in labels]
        gt = _transform_from(data["gt"]) if data.get("gt") is not None else None
        return cls(scans, images, labels, gt)

    def write(self, path):
        _write_json(path, self.to_dict())

    @classmethod
    def read(cls, path):
        return cls.from_dict(_read_json(path))


def _board_dict(b: BoardObservation):
    return {"N": [_floats(b.Nx), _floats(b.Ny), _floats(b.Nz)], "dims": [float(b.dx), float(b.dy)]}


def _board_from(d):
    """A board given either by its N vectors or by a camera-frame pose."""
    if not isinstance(d, dict) or "dims" not in d:
        raise FormatError("each board needs 'dims' [dx, dy] plus 'N' or 'pose'")
    dx, dy = (float(v) for v in d["dims"])
    if "N" in d:
        Nx, Ny, Nz = d["N"]
        return BoardObservation(Nx, Ny, Nz, dx, dy)
    if "pose" in d:
        return normals_from_pose(BoardPose(d["pose"]["R"], d["pose"]["t"]), dx, dy)
    raise FormatError("board needs 'N' or 'pose'")


@dataclass
class ResultFile:
    transform: RigidTransform
    best_q: int
    inliers: list  # per scan: list of (point index, board index)
    terminated_by: str
    trace: list = field(default_factory=list)  # TraceRecord rows
    iterations: int = 0

    def __post_init__(self):
        if self.terminated_by not in TERMINATIONS:
            raise FormatError(f"unknown termination {self.terminated_by!r}")
        if sum(len(s) for s in self.inliers) != self.best_q:
            raise FormatError("inlier count does not match best_q")
        check_trace(self.trace)

    @classmethod
    def from_result(cls, result: ExtractionResult):
        return cls(result.best, int(result.best_q), result.correspondences,
                   result.terminated_by, list(result.trace), int(result.iterations))

    def to_dict(self):
        return {
            "format": RESULT_FORMAT,
            "version": VERSION,
            "transform": _transform_dict(self.transform),
            "best_q": int(self.best_q),
            "terminated_by": self.terminated_by,
            "iterations": int(self.iterations),
            "inliers": [[[int(j), int(k)] for j, k in scan] for scan in self.inliers],
            "trace": {
                "columns": list(TraceRecord._fields),
                "rows": [[int(v) for v in rec] for rec in self.trace],
            },
        }

    @classmethod
    def from_dict(cls, data):
        _check_header(data, RESULT_FORMAT)
        try:
            if data["trace"]["columns"] != list(TraceRecord._fields):
                raise FormatError("unexpected trace columns")
            trace = [TraceRecord(*row) for row in data["trace"]["rows"]]
            inliers = [[(int(j), int(k)) for j, k in scan] for scan in data["inliers"]]
            return cls(_transform_from(data["transform"]), int(data["best_q"]), inliers,
                       data["terminated_by"], trace, int(data.get("iterations", len(trace))))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad result: {exc}") from exc

    def check_against(self, scene: SceneFile):
        """Inlier indices must address existing points and boards."""
        if len(self.inliers) != len(scene.scans):
            raise FormatError("result and scene disagree on the number of scans")
        for i, scan in enumerate(self.inliers):
            for j, k in scan:
                if not (0 <= j < len(scene.scans[i]) and 0 <= k < len(scene.images[i])):
                    raise FormatError(f"scan {i}: inlier ({j}, {k}) out of range")

    def write(self, path):
        _write_json(path, self.to_dict())

    @classmethod
    def read(cls, path):
        return cls.from_dict(_read_json(path))


def check_trace(trace):
    """Q* must never decrease and the popped bound never increase."""
    for a, b in zip(trace, trace[1:]):
        if b.q_star < a.q_star:
            raise FormatError(f"Q* decreases at iteration {b.iteration}")
        if b.upper > a.upper:
            raise FormatError(f"popped bound increases at iteration {b.iteration}")


def dumps(data) -> str:
    return json.dumps(data, indent=1, allow_nan=False) + "\n"


def _write_json(path, data):
    with open(path, "w") as fh:
        fh.write(dumps(data))


def _read_json(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc
