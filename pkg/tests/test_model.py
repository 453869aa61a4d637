import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbextract.geometry import angle_axis_to_matrix
from cbextract.model import (
    BoardObservation,
    BoardPose,
    DegeneratePoseError,
    RigidTransform,
    inlier_box_test,
    normals_from_pose,
)

DX = DY = 0.75


def random_pose(rng, dist=3.0):
    R = angle_axis_to_matrix(rng.uniform(-0.8, 0.8, 3))
    t = np.array([rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), dist])
    return BoardPose(R, t)


def board_point(pose, u, v):
    return pose.R @ np.array([u, v, 0.0]) + pose.t


def test_identity_pose_example():
    b = normals_from_pose(BoardPose(np.eye(3), [0.3, 0.4, 2.0]), DX, DY)
    assert np.allclose(b.Nx, [0.3, 0, 0])
    assert np.allclose(b.Ny, [0, 0.4, 0])
    assert np.allclose(b.Nz, [0, 0, 2])


def test_degenerate_pose():
    with pytest.raises(DegeneratePoseError):
        normals_from_pose(BoardPose(np.eye(3), [0.0, 0.0, 2.0]), DX, DY)


def test_normals_sign_and_length():
    # a plane on the negative side flips the axis so the length stays a distance
    b = normals_from_pose(BoardPose(np.eye(3), [-0.3, 0.4, -2.0]), DX, DY)
    assert np.allclose(b.Nx, [-0.3, 0, 0])
    assert np.allclose(b.Nz, [0, 0, -2])
    assert np.allclose(b.norms, [0.3, 0.4, 2.0])


def test_axes_orthogonal():
    rng = np.random.default_rng(0)
    for _ in range(50):
        b = normals_from_pose(random_pose(rng), DX, DY)
        G = b.axes @ b.axes.T
        assert np.allclose(G, np.eye(3), atol=1e-9)


def test_board_points_pass_under_identity():
    rng = np.random.default_rng(1)
    T = RigidTransform()
    for _ in range(30):
        pose = random_pose(rng)
        b = normals_from_pose(pose, DX, DY)
        for u, v in rng.uniform(-1, 1, size=(20, 2)) * [DX, DY]:
            for eps in (1e-6, 0.07, 1.0):
                assert inlier_box_test(board_point(pose, u, v), T, b, eps)


def test_board_center_passes_through_transform():
    T = RigidTransform([0, np.deg2rad(10), 0], [-0.75, -0.2, 0.5])
    pose = BoardPose(angle_axis_to_matrix([0.2, -0.3, 0.1]), [0.2, 0.1, 3.0])
    b = normals_from_pose(pose, DX, DY)
    p = T.to_laser(pose.t)
    assert inlier_box_test(p, T, b, 0.07)
    # two eps along the normal violates the z condition
    n = T.matrix @ b.axes[2]
    assert not inlier_box_test(p + 2 * 0.07 * n, T, b, 0.07)


def test_strict_inequality_at_edge():
    b = BoardObservation([1.0, 0, 0], [0, 1.0, 0], [0, 0, 2.0], 0.5, 0.5)
    T = RigidTransform()
    eps = 0.25
    # exactly on the z limit: |2.25 - 2| == eps is an outlier
    assert not inlier_box_test([1.0, 1.0, 2.25], T, b, eps)
    assert inlier_box_test([1.0, 1.0, 2.2499], T, b, eps)
    # x limit dx + eps = 0.75
    assert not inlier_box_test([1.75, 1.0, 2.0], T, b, eps)
    assert inlier_box_test([1.7499, 1.0, 2.0], T, b, eps)


vec = st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=3)


@settings(max_examples=100, deadline=None)
@given(vec, vec)
def test_translation_covariance(p, w):
    T = RigidTransform([0.1, 0.2, -0.1], [0.3, -0.2, 0.5])
    b = normals_from_pose(BoardPose(angle_axis_to_matrix([0.1, 0.4, 0.0]), [0.4, -0.3, 2.5]), DX, DY)
    p, w = np.array(p), np.array(w)
    T2 = RigidTransform(T.rotvec, T.translation + w)
    assert inlier_box_test(p, T, b, 0.5) == inlier_box_test(p + w, T2, b, 0.5)


def test_eps_monotone():
    rng = np.random.default_rng(2)
    T = RigidTransform([0, 0.17, 0], [-0.75, -0.2, 0.5])
    b = normals_from_pose(random_pose(rng), DX, DY)
    pts = T.to_laser(rng.normal(size=(500, 3)) + [0, 0, 3])
    eps = [0.01, 0.05, 0.2, 0.8]
    sets = [{i for i, p in enumerate(pts) if inlier_box_test(p, T, b, e)} for e in eps]
    for a, c in zip(sets, sets[1:]):
        assert a <= c
    assert len(sets[-1]) > len(sets[0])


def test_transform_round_trip():
    T = RigidTransform([0.3, -0.2, 0.1], [1.0, 2.0, 3.0])
    pc = np.random.default_rng(3).normal(size=(10, 3))
    assert np.allclose(T.to_camera(T.to_laser(pc)), pc)
    T2 = RigidTransform.from_matrix(T.matrix, T.translation)
    assert np.allclose(T2.rotvec, T.rotvec)


def test_observation_validation():
    with pytest.raises(ValueError):
        BoardObservation([1, 0, 0], [0, 1, 0], [0, 0, 1], 0.0, 0.5)
    with pytest.raises(ValueError):
        BoardObservation([np.nan, 0, 0], [0, 1, 0], [0, 0, 1], 0.5, 0.5)


def test_rotated_keeps_lengths():
    b = normals_from_pose(BoardPose(np.eye(3), [0.3, 0.4, 2.0]), DX, DY)
    r = b.rotated(angle_axis_to_matrix([0.01, 0.02, -0.01]))
    assert np.allclose(r.norms, b.norms)
    assert not np.allclose(r.Nz, b.Nz)
