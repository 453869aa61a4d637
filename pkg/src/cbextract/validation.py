"""Input checks shared by the functional API and the estimator."""

from __future__ import annotations

import numbers

import numpy as np

from .model import BoardObservation


def check_scans(scans):
    """Coerce scans to a list of finite float arrays of shape (m_i, 3)."""
    if isinstance(scans, np.ndarray) and scans.ndim == 2:
        scans = [scans]
    out = []
    for i, s in enumerate(scans):
        a = np.asarray(s, dtype=float)
        if a.size == 0:
            a = a.reshape(0, 3)
        if a.ndim != 2 or a.shape[1] != 3:
            raise ValueError(f"scan {i}: expected shape (m, 3), got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError(f"scan {i}: non-finite coordinates")
        out.append(a)
    if not out:
        raise ValueError("at least one scan is required")
    return out


def check_images(images):
    out = []
    for i, boards in enumerate(images):
        if isinstance(boards, BoardObservation):
            boards = [boards]
        boards = list(boards)
        for b in boards:
            if not isinstance(b, BoardObservation):
                raise TypeError(f"image {i}: expected BoardObservation, got {type(b).__name__}")
            if np.any(b.norms <= 0):
                raise ValueError(f"image {i}: board axis with zero length")
        out.append(boards)
    return out


def check_scene(scans, images):
    scans = check_scans(scans)
    images = check_images(images)
    if len(scans) != len(images):
        raise ValueError(f"got {len(scans)} scans but {len(images)} images")
    return scans, images


def check_positive(name, value):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive number, got {value!r}")
    return float(value)
