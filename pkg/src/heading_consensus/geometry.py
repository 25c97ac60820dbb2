"""Planar rotation and orthogonal-projection primitives.

Vectors are numpy float64 arrays of shape (2,), matrices of shape (2, 2).
Unit vectors (headings) are produced by :func:`unit` / :func:`unit_from_angle`
and kept at norm 1 by the callers' renormalization.
"""

from __future__ import annotations

import math

import numpy as np

TAU = 2.0 * math.pi

#: tolerance on |x^2 + y^2 - 1| for a vector to count as unit
UNIT_TOL = 1e-12
#: below this norm a vector has no usable direction
ZERO_NORM = 1e-9
#: 2x2 solves with |det| at or below this are treated as singular; the
#: target-recovery system degenerates exactly for parallel desired headings,
#: so near-singularity means invalid input, not a numerical edge case.
SINGULAR_DET = 1e-10


class ZeroVectorError(ValueError):
    """A direction was requested from a (near-)zero vector."""


class SingularMatrixError(ValueError):
    """A 2x2 solve met a (near-)singular matrix, e.g. parallel headings."""


def unit(v) -> np.ndarray:
    """Return ``v`` scaled to unit length.

    Raises ZeroVectorError if ``norm(v) < 1e-9``.
    """
    v = np.asarray(v, dtype=float)
    n = math.hypot(v[0], v[1])
    if n < ZERO_NORM:
        raise ZeroVectorError(f"cannot normalize near-zero vector {v.tolist()}")
    return v / n


def unit_from_angle(theta: float) -> np.ndarray:
    """Unit vector at angle ``theta`` from the +x axis."""
    return np.array([math.cos(theta), math.sin(theta)])


def is_unit(v, tol: float = UNIT_TOL) -> bool:
    return abs(float(v[0]) ** 2 + float(v[1]) ** 2 - 1.0) <= tol


def wrap_angle(a: float) -> float:
    """Wrap an angle to the canonical interval (-pi, pi]."""
    w = math.remainder(a, TAU)
    return math.pi if w == -math.pi else w


def rotation(alpha: float) -> np.ndarray:
    """Matrix rotating plane vectors counterclockwise through ``alpha``."""
    c = math.cos(alpha)
    s = math.sin(alpha)
    return np.array([[c, -s], [s, c]])


def projector(b) -> np.ndarray:
    """Orthogonal projector ``I - b b^T`` for a unit vector ``b``.

    Symmetric, idempotent, positive semidefinite; its null space is span(b),
    so ``projector(b) @ b = 0``.
    """
    bx = float(b[0])
    by = float(b[1])
    return np.array([[1.0 - bx * bx, -bx * by], [-bx * by, 1.0 - by * by]])


def angle_between(v_from, v_to) -> float:
    """Signed angle ``alpha`` in (-pi, pi] with ``rotation(alpha) @ v_from = v_to``.

    Both inputs must be unit vectors.
    """
    cross = float(v_from[0]) * float(v_to[1]) - float(v_from[1]) * float(v_to[0])
    dot = float(v_from[0]) * float(v_to[0]) + float(v_from[1]) * float(v_to[1])
    return wrap_angle(math.atan2(cross, dot))


def solve_2x2(m, rhs) -> np.ndarray:
    """Solve ``m @ x = rhs`` for a 2x2 system by Cramer's rule.

    Raises SingularMatrixError when ``|det(m)| <= 1e-10``.
    """
    a = float(m[0][0])
    b = float(m[0][1])
    c = float(m[1][0])
    d = float(m[1][1])
    det = a * d - b * c
    if abs(det) <= SINGULAR_DET:
        raise SingularMatrixError(f"2x2 system is singular (det={det:.3e})")
    r0 = float(rhs[0])
    r1 = float(rhs[1])
    return np.array([(r0 * d - r1 * b) / det, (a * r1 - c * r0) / det])


def is_rotation(m, tol: float = UNIT_TOL) -> bool:
    """True when ``m^T m = I`` and ``det(m) = +1`` within ``tol``."""
    m = np.asarray(m, dtype=float)
    if np.abs(m.T @ m - np.eye(2)).max() > tol:
        return False
    return abs(float(np.linalg.det(m)) - 1.0) <= tol


def is_projector(m, tol: float = UNIT_TOL) -> bool:
    """True when ``m = m^T = m @ m`` within ``tol``."""
    m = np.asarray(m, dtype=float)
    if np.abs(m - m.T).max() > tol:
        return False
    return np.abs(m @ m - m).max() <= tol
