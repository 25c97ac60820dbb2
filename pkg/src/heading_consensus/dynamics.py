"""Heading dynamics under the projection control laws.

The root steers its heading toward its desired heading, every other agent
toward the sum of its in-neighbors' headings rotated by the desired angles;
both velocities are projected orthogonal to the own heading, so headings stay
on the unit circle.  Integration is classical fixed-step RK4 followed by
renormalization of every heading.

Both the global-frame and the local-frame formulations run through one jitted
kernel that keeps each agent's state in its own frame (rotation ``R_i``); the
global simulation simply uses identity frames, which also makes the two
formulations bitwise identical in that case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .geometry import projector, rotation
from .graph import Digraph
from .scenario import Scenario

DEFAULT_DT = 1e-3
DEFAULT_T_FINAL = 30.0


@dataclass(frozen=True, eq=False)
class HeadingState:
    """All agents' headings at one instant."""

    headings: np.ndarray  # (n, 2) unit rows
    time: float = 0.0


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-ordered record of all agents' headings for one scenario."""

    times: np.ndarray     # (K,)
    headings: np.ndarray  # (K, n, 2)
    scenario: Scenario

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "headings", np.asarray(self.headings, dtype=float))
        self.times.flags.writeable = False
        self.headings.flags.writeable = False

    @property
    def final_headings(self) -> np.ndarray:
        return self.headings[-1]


def control_root(b1, b1_star) -> np.ndarray:
    """Head-point velocity of the root: ``P_b1 @ b1*``.

    Zero exactly when ``b1 = +-b1*``; only the aligned equilibrium is stable.
    """
    return projector(b1) @ np.asarray(b1_star, dtype=float)


def control_agent(i: int, headings, graph: Digraph, desired_angles) -> np.ndarray:
    """Head-point velocity of follower ``i``.

    ``P_bi @ sum_j R(alpha*_ij) b_j`` over the in-neighbors j.  A zero
    neighbor sum (exact cancellation) yields a zero signal and the agent
    holds its heading.
    """
    s = np.zeros(2)
    for j in graph.in_neighbors(i):
        s += rotation(desired_angles[(j, i)]) @ np.asarray(headings[j - 1], dtype=float)
    return projector(headings[i - 1]) @ s


def control_signals(scenario: Scenario, headings) -> np.ndarray:
    """Stack of all agents' control signals at the given headings."""
    out = np.empty((scenario.n, 2))
    for v in range(1, scenario.n + 1):
        if v == scenario.root:
            out[v - 1] = control_root(headings[v - 1], scenario.root_desired_heading)
        else:
            out[v - 1] = control_agent(v, headings, scenario.graph, scenario.desired_angles)
    return out


def angular_speed(b, u) -> float:
    """Magnitude of the heading's angular velocity, ``norm(P_b @ u)``."""
    w = projector(b) @ np.asarray(u, dtype=float)
    return math.hypot(w[0], w[1])


@njit(cache=True, nogil=True)
def _deriv(y, frames, v_root, root, indptr, nbrs, rot, dy):
    # y holds each agent's heading in its own frame.  Neighbor headings are
    # mapped to agent i's frame via R_i^T R_j before the desired-angle
    # rotation; the derivative is projected orthogonal to the own heading.
    n = y.shape[0]
    for i in range(n):
        if i == root:
            sx = v_root[0]
            sy = v_root[1]
        else:
            sx = 0.0
            sy = 0.0
            for e in range(indptr[i], indptr[i + 1]):
                j = nbrs[e]
                gx = frames[j, 0, 0] * y[j, 0] + frames[j, 0, 1] * y[j, 1]
                gy = frames[j, 1, 0] * y[j, 0] + frames[j, 1, 1] * y[j, 1]
                lx = frames[i, 0, 0] * gx + frames[i, 1, 0] * gy
                ly = frames[i, 0, 1] * gx + frames[i, 1, 1] * gy
                sx += rot[e, 0, 0] * lx + rot[e, 0, 1] * ly
                sy += rot[e, 1, 0] * lx + rot[e, 1, 1] * ly
        d = y[i, 0] * sx + y[i, 1] * sy
        dy[i, 0] = sx - y[i, 0] * d
        dy[i, 1] = sy - y[i, 1] * d


@njit(cache=True, nogil=True)
def _integrate(y0, frames, v_root, root, indptr, nbrs, rot, dt, nsteps, stride, out):
    # Classical RK4 with renormalization after every full step.  Records the
    # state every `stride` steps into `out` (row 0 is the initial state) and
    # appends the final state when it does not fall on the stride grid.
    n = y0.shape[0]
    y = y0.copy()
    k1 = np.empty((n, 2))
    k2 = np.empty((n, 2))
    k3 = np.empty((n, 2))
    k4 = np.empty((n, 2))
    yt = np.empty((n, 2))
    out[0] = y
    rec = 1
    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(1, nsteps + 1):
        _deriv(y, frames, v_root, root, indptr, nbrs, rot, k1)
        for i in range(n):
            yt[i, 0] = y[i, 0] + half * k1[i, 0]
            yt[i, 1] = y[i, 1] + half * k1[i, 1]
        _deriv(yt, frames, v_root, root, indptr, nbrs, rot, k2)
        for i in range(n):
            yt[i, 0] = y[i, 0] + half * k2[i, 0]
            yt[i, 1] = y[i, 1] + half * k2[i, 1]
        _deriv(yt, frames, v_root, root, indptr, nbrs, rot, k3)
        for i in range(n):
            yt[i, 0] = y[i, 0] + dt * k3[i, 0]
            yt[i, 1] = y[i, 1] + dt * k3[i, 1]
        _deriv(yt, frames, v_root, root, indptr, nbrs, rot, k4)
        for i in range(n):
            y[i, 0] += sixth * (k1[i, 0] + 2.0 * k2[i, 0] + 2.0 * k3[i, 0] + k4[i, 0])
            y[i, 1] += sixth * (k1[i, 1] + 2.0 * k2[i, 1] + 2.0 * k3[i, 1] + k4[i, 1])
            nrm = math.sqrt(y[i, 0] * y[i, 0] + y[i, 1] * y[i, 1])
            y[i, 0] /= nrm
            y[i, 1] /= nrm
        if step % stride == 0:
            out[rec] = y
            rec += 1
    if nsteps % stride != 0:
        out[rec] = y


def _edge_arrays(scenario: Scenario):
    """CSR in-neighbor arrays (0-based) plus per-edge rotation matrices."""
    n = scenario.n
    counts = np.zeros(n + 1, dtype=np.int64)
    flat: list[tuple[int, int]] = []
    for v in range(1, n + 1):
        if v == scenario.root:
            continue
        for j in scenario.graph.in_neighbors(v):
            flat.append((v - 1, j - 1))
        counts[v] = len(scenario.graph.in_neighbors(v))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts[1:], out=indptr[1:])
    nbrs = np.array([j for _, j in flat], dtype=np.int64).reshape(-1)
    rot = np.empty((len(flat), 2, 2))
    for e, (i0, j0) in enumerate(flat):
        rot[e] = rotation(scenario.desired_angles[(j0 + 1, i0 + 1)])
    return indptr, nbrs, rot


def _frame_matrices(frame_angles) -> np.ndarray:
    frames = np.empty((len(frame_angles), 2, 2))
    for idx, theta in enumerate(frame_angles):
        frames[idx] = rotation(float(theta))
    return frames


def _run(scenario: Scenario, b0, frame_angles, dt: float, nsteps: int, stride: int):
    """Integrate ``nsteps`` RK4 steps and return (times, global headings)."""
    frames = _frame_matrices(frame_angles)
    b0 = np.asarray(b0, dtype=float)
    # local state y_i = R_i^T b_i; the root chases R_root^T b_root*
    y0 = np.einsum("ikj,ik->ij", frames, b0)
    root = scenario.root - 1
    v_root = frames[root].T @ scenario.root_desired_heading
    indptr, nbrs, rot = _edge_arrays(scenario)

    nrec = nsteps // stride + 1 + (1 if nsteps % stride else 0)
    out = np.empty((nrec, scenario.n, 2))
    _integrate(y0, frames, v_root, root, indptr, nbrs, rot,
               float(dt), nsteps, stride, out)

    steps = list(range(0, nsteps + 1, stride))
    if nsteps % stride:
        steps.append(nsteps)
    times = np.array(steps, dtype=float) * dt
    headings = np.einsum("ijk,tik->tij", frames, out)
    return times, headings


def _check_params(dt: float, t_final: float, record_every: int) -> int:
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_final < 0.0:
        raise ValueError(f"t_final must be nonnegative, got {t_final}")
    if record_every < 1:
        raise ValueError(f"record_every must be >= 1, got {record_every}")
    # whole steps only; a trailing fraction of a step is not taken
    return int(math.floor(t_final / dt + 1e-9))


def step(state: HeadingState, scenario: Scenario, dt: float) -> HeadingState:
    """Advance all headings by one RK4 step of length ``dt``."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    _, headings = _run(scenario, state.headings, np.zeros(scenario.n), dt, 1, 1)
    return HeadingState(headings[-1], state.time + dt)


def simulate(scenario: Scenario, dt: float = DEFAULT_DT,
             t_final: float = DEFAULT_T_FINAL, record_every: int = 1,
             initial_headings=None) -> Trajectory:
    """Integrate the global-frame dynamics from the scenario's initial headings.

    Records every ``record_every``-th state, always including the initial and
    final states.  ``initial_headings`` replaces the scenario's start without
    re-running its validation; scenario construction rejects starts too close
    to the root's antipodal equilibrium, and this is the escape hatch for
    deliberately probing that excluded set.
    """
    nsteps = _check_params(dt, t_final, record_every)
    if initial_headings is None:
        initial_headings = scenario.initial_headings
    else:
        initial_headings = np.asarray(initial_headings, dtype=float)
        if initial_headings.shape != (scenario.n, 2):
            raise ValueError(
                f"expected initial headings of shape ({scenario.n}, 2), got "
                f"{initial_headings.shape}"
            )
    times, headings = _run(scenario, initial_headings,
                           np.zeros(scenario.n), dt, nsteps, record_every)
    return Trajectory(times, headings, scenario)


def simulate_local_frame(scenario: Scenario, frame_angles, dt: float = DEFAULT_DT,
                         t_final: float = DEFAULT_T_FINAL,
                         record_every: int = 1) -> Trajectory:
    """Integrate the dynamics with each agent working in its own frame.

    ``frame_angles[i]`` rotates agent i+1's frame relative to the global one.
    Agents exchange headings expressed in their own frames and convert them on
    receipt; the returned trajectory is expressed in the global frame, and is
    equivalent to :func:`simulate` up to floating-point rounding (identical
    when all frame angles are zero).
    """
    frame_angles = np.asarray(frame_angles, dtype=float)
    if frame_angles.shape != (scenario.n,):
        raise ValueError(
            f"expected {scenario.n} frame angles, got shape {frame_angles.shape}"
        )
    nsteps = _check_params(dt, t_final, record_every)
    times, headings = _run(scenario, scenario.initial_headings,
                           frame_angles, dt, nsteps, record_every)
    return Trajectory(times, headings, scenario)
