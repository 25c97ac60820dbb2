"""Post-hoc convergence metrics for recorded trajectories.

Distinguishes the two outcomes the control law can produce: all desired
angles satisfied AND all heading rays meeting in one point (consensus), or
angles satisfied while the rays spread (a misdirected root).  The common
point estimate is the least-squares intersection of the heading lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SingularMatrixError, projector, rotation, solve_2x2
from .dynamics import Trajectory

#: default final-sample threshold on edge and root errors
DEFAULT_ANGLE_TOL = 1e-4
#: default threshold (m) on the RMS distance of the intersection to the rays
DEFAULT_RESIDUAL_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class AnalysisReport:
    """Convergence verdicts and the series they were computed from.

    ``consensus`` implies ``angles_satisfied``; the converse can fail when
    the root is misdirected.  ``intersection_point`` is None (and the
    residual infinite) when all final headings are parallel.
    """

    edge_error_series: dict[tuple[int, int], np.ndarray]
    root_error_series: np.ndarray
    lyapunov_series: np.ndarray          # (n, K), agent i-1 in row i-1
    final_edge_errors: dict[tuple[int, int], float]
    final_root_error: float
    intersection_point: np.ndarray | None
    intersection_residual: float
    forward_ok: bool
    angles_satisfied: bool
    consensus: bool


def edge_error(b_i, b_j, alpha: float) -> float:
    """Angle error ``norm(b_i - rotation(alpha) @ b_j)`` in [0, 2]."""
    r = rotation(alpha) @ np.asarray(b_j, dtype=float)
    return math.hypot(b_i[0] - r[0], b_i[1] - r[1])


def least_squares_intersection(positions, headings):
    """Point minimizing the summed squared distances to all heading lines.

    Returns ``(point, residual)`` where the residual is the RMS perpendicular
    distance (m) from the point to the lines.  Raises SingularMatrixError
    when all headings are parallel and no unique minimizer exists.
    """
    positions = np.asarray(positions, dtype=float)
    headings = np.asarray(headings, dtype=float)
    m = np.zeros((2, 2))
    rhs = np.zeros(2)
    projectors = []
    for p, b in zip(positions, headings):
        pr = projector(b)
        projectors.append(pr)
        m += pr
        rhs += pr @ p
    point = solve_2x2(m, rhs)
    sq = 0.0
    for p, pr in zip(positions, projectors):
        d = pr @ (point - p)
        sq += d[0] * d[0] + d[1] * d[1]
    return point, math.sqrt(sq / len(positions))


def pairwise_intersections(positions, headings):
    """Intersection of every pair of heading lines, for inspection.

    Returns a dict mapping the agent pair (i, j), 1-based, to the point or to
    None for parallel lines.
    """
    positions = np.asarray(positions, dtype=float)
    headings = np.asarray(headings, dtype=float)
    n = len(positions)
    points = {}
    for a in range(n):
        for b in range(a + 1, n):
            try:
                pt, _ = least_squares_intersection(positions[[a, b]], headings[[a, b]])
            except SingularMatrixError:
                pt = None
            points[(a + 1, b + 1)] = pt
    return points


def lyapunov_value(agent: int, headings, scenario) -> float:
    """Per-agent potential from the convergence analysis.

    Root: ``0.5 * norm(b_root - b_root*)^2``.  Follower i: half the sum of
    squared edge errors over its in-edges, at the current headings.
    """
    headings = np.asarray(headings, dtype=float)
    if agent == scenario.root:
        d = headings[agent - 1] - scenario.root_desired_heading
        return 0.5 * float(d @ d)
    total = 0.0
    for j in scenario.graph.in_neighbors(agent):
        e = edge_error(headings[agent - 1], headings[j - 1],
                       scenario.desired_angles[(j, agent)])
        total += e * e
    return 0.5 * total


def analyze(trajectory: Trajectory, tol_angle: float = DEFAULT_ANGLE_TOL,
            tol_residual: float = DEFAULT_RESIDUAL_TOL) -> AnalysisReport:
    """Compute error series and the consensus verdict for a trajectory.

    ``angles_satisfied`` looks at the final sample's edge errors;
    ``consensus`` additionally requires the root error below ``tol_angle``,
    the least-squares intersection residual below ``tol_residual``, and the
    intersection point lying in front of every agent.
    """
    scenario = trajectory.scenario
    headings = trajectory.headings          # (K, n, 2)
    n = scenario.n

    edge_series: dict[tuple[int, int], np.ndarray] = {}
    for j, i in scenario.graph.edges:
        rot = rotation(scenario.desired_angles[(j, i)])
        diff = headings[:, i - 1, :] - headings[:, j - 1, :] @ rot.T
        edge_series[(j, i)] = np.linalg.norm(diff, axis=1)

    root_idx = scenario.root - 1
    root_series = np.linalg.norm(
        headings[:, root_idx, :] - scenario.root_desired_heading, axis=1
    )

    lyap = np.zeros((n, headings.shape[0]))
    lyap[root_idx] = 0.5 * root_series**2
    for (j, i), series in edge_series.items():
        lyap[i - 1] += 0.5 * series**2

    final = headings[-1]
    final_edge = {edge: float(series[-1]) for edge, series in edge_series.items()}
    angles_satisfied = all(e < tol_angle for e in final_edge.values())
    final_root = float(root_series[-1])

    try:
        point, residual = least_squares_intersection(scenario.positions, final)
        forward_ok = bool(
            np.all(np.einsum("ij,ij->i", point - scenario.positions, final) > 0.0)
        )
    except SingularMatrixError:
        point = None
        residual = math.inf
        forward_ok = False

    consensus = (
        angles_satisfied
        and final_root < tol_angle
        and residual < tol_residual
        and forward_ok
    )
    return AnalysisReport(
        edge_error_series=edge_series,
        root_error_series=root_series,
        lyapunov_series=lyap,
        final_edge_errors=final_edge,
        final_root_error=final_root,
        intersection_point=point,
        intersection_residual=residual,
        forward_ok=forward_ok,
        angles_satisfied=angles_satisfied,
        consensus=consensus,
    )
