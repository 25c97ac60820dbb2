import math

import numpy as np
import pytest

from heading_consensus.geometry import (
    SingularMatrixError,
    ZeroVectorError,
    angle_between,
    is_projector,
    is_rotation,
    is_unit,
    projector,
    rotation,
    solve_2x2,
    unit,
    unit_from_angle,
    wrap_angle,
)

RNG = np.random.default_rng(2024)


def test_rotation_identity():
    assert np.array_equal(rotation(0.0), np.eye(2))


def test_rotation_quarter_turn():
    np.testing.assert_allclose(rotation(math.pi / 2) @ [1.0, 0.0], [0.0, 1.0],
                               atol=1e-12)


def test_rotation_third_turn():
    # closed-form evaluation: R(pi/3) @ (-1, 0) = (-cos(pi/3), -sin(pi/3))
    expected = np.array([-0.5, -math.sqrt(3) / 2])
    np.testing.assert_allclose(rotation(math.pi / 3) @ [-1.0, 0.0], expected,
                               atol=1e-15)


def test_rotation_flags():
    for _ in range(50):
        assert is_rotation(rotation(RNG.uniform(-10, 10)))


def test_rotation_composition_commutes():
    for _ in range(100):
        a1, a2 = RNG.uniform(-10, 10, size=2)
        r12 = rotation(a1) @ rotation(a2)
        r21 = rotation(a2) @ rotation(a1)
        np.testing.assert_allclose(r12, r21, atol=1e-12)
        np.testing.assert_allclose(r12, rotation(a1 + a2), atol=1e-12)


def test_rotation_inverse_is_transpose():
    for _ in range(100):
        a = RNG.uniform(-10, 10)
        np.testing.assert_allclose(np.linalg.inv(rotation(a)), rotation(a).T,
                                   atol=1e-12)


def test_projector_axis_aligned():
    np.testing.assert_allclose(projector([1.0, 0.0]), [[0.0, 0.0], [0.0, 1.0]],
                               atol=1e-15)


def test_projector_annihilates_its_vector():
    for _ in range(100):
        b = unit_from_angle(RNG.uniform(0, 2 * math.pi))
        np.testing.assert_allclose(projector(b) @ b, [0.0, 0.0], atol=1e-15)


def test_projector_diagonal_case():
    b = np.array([math.sqrt(2) / 2, math.sqrt(2) / 2])
    # independent outer-product computation
    expected = np.eye(2) - np.outer(b, b)
    np.testing.assert_allclose(projector(b), expected, atol=1e-15)
    np.testing.assert_allclose(projector(b), [[0.5, -0.5], [-0.5, 0.5]], atol=1e-12)


def test_projector_idempotent_symmetric_eigvals():
    for _ in range(50):
        p = projector(unit_from_angle(RNG.uniform(0, 2 * math.pi)))
        assert is_projector(p)
        np.testing.assert_allclose(sorted(np.linalg.eigvalsh(p)), [0.0, 1.0],
                                   atol=1e-12)


def test_angle_between_identical():
    b = unit_from_angle(0.37)
    assert angle_between(b, b) == 0.0


def test_angle_between_quarter():
    assert angle_between([1.0, 0.0], [0.0, 1.0]) == pytest.approx(math.pi / 2)


def test_angle_between_inverts_rotation_example():
    assert angle_between([-1.0, 0.0], [-0.5, -math.sqrt(3) / 2]) == pytest.approx(
        math.pi / 3, abs=1e-12)


def test_angle_between_left_inverse_of_rotation():
    for _ in range(200):
        v = unit_from_angle(RNG.uniform(0, 2 * math.pi))
        a = RNG.uniform(-10, 10)
        assert angle_between(v, rotation(a) @ v) == pytest.approx(
            wrap_angle(a), abs=1e-9)


def test_wrap_angle_range_and_idempotence():
    for a in [*RNG.uniform(-50, 50, size=200), 0.0, math.pi, -math.pi,
              3 * math.pi, -3 * math.pi]:
        w = wrap_angle(a)
        assert -math.pi < w <= math.pi
        assert wrap_angle(w) == w


def test_wrap_angle_boundary():
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi


def test_unit_normalizes_and_rejects_zero():
    v = unit([3.0, 4.0])
    np.testing.assert_allclose(v, [0.6, 0.8], atol=1e-15)
    assert is_unit(v)
    u = unit([1e-9, 0.0])
    assert is_unit(u)
    with pytest.raises(ZeroVectorError):
        unit([0.0, 0.0])
    with pytest.raises(ZeroVectorError):
        unit([1e-10, 1e-10])


def test_solve_identity():
    np.testing.assert_allclose(solve_2x2(np.eye(2), [3.0, 4.0]), [3.0, 4.0])


def test_solve_diagonal():
    np.testing.assert_allclose(solve_2x2([[2.0, 0.0], [0.0, 2.0]], [2.0, 4.0]),
                               [1.0, 2.0])


def test_solve_hexagon_target_system():
    # the root/first-follower system for the hexagon recovers the origin
    b1s = np.array([-1.0, 0.0])
    b2s = np.array([-0.5, -math.sqrt(3) / 2])
    p1 = np.array([2.0, 0.0])
    p2 = np.array([1.0, math.sqrt(3)])
    m = projector(b1s) + projector(b2s)
    rhs = projector(b1s) @ p1 + projector(b2s) @ p2
    np.testing.assert_allclose(solve_2x2(m, rhs), [0.0, 0.0], atol=1e-12)


def test_solve_singular_raises():
    b = unit_from_angle(1.0)
    with pytest.raises(SingularMatrixError):
        solve_2x2(projector(b) + projector(-b), [1.0, 1.0])


def test_solve_random_against_numpy():
    for _ in range(100):
        m = RNG.normal(size=(2, 2))
        if abs(np.linalg.det(m)) < 1e-6:
            continue
        rhs = RNG.normal(size=2)
        np.testing.assert_allclose(solve_2x2(m, rhs), np.linalg.solve(m, rhs),
                                   atol=1e-9)
