"""Problem instances: agent positions, desired angles, and feasibility checks.

A :class:`Scenario` bundles everything a simulation needs.  Desired angles can
be synthesized from a known target (:func:`synthesize_angles`) or given
directly; :func:`check_feasibility` verifies that a given angle set actually
encodes one common target and returns the :class:`FeasibilityCertificate`
(the target plus every agent's desired heading).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import (
    TAU,
    angle_between,
    projector,
    rotation,
    solve_2x2,
    unit,
    wrap_angle,
)
from .graph import Digraph, ensure_rooted_out_branching, topological_order

#: agreement tolerance for desired headings propagated along different edges
PROPAGATION_TOL = 1e-9
#: max distance (m) between a desired-heading ray and the common target
RAY_TOL = 1e-6
#: margin on b1(0) . b1* > -1 (assumption 3, first part)
ANTIPODAL_TOL = 1e-9
#: margin keeping the first follower's angle away from {0, pi} (assumption 3)
DEGENERATE_ANGLE_TOL = 1e-9
#: minimum distance (m) between the target and any agent position
MIN_TARGET_DISTANCE = 1e-9

_SAMPLE_RETRIES = 100


class ScenarioError(ValueError):
    """Invalid or internally inconsistent scenario data."""


class TargetCoincidesWithAgentError(ScenarioError):
    def __init__(self, agent: int):
        self.agent = agent
        super().__init__(
            f"target coincides with agent {agent}; the bearing is undefined "
            "(assumption 2 feasibility)"
        )


class InconsistentAnglesError(ScenarioError):
    def __init__(self, vertex: int):
        self.vertex = vertex
        super().__init__(
            f"desired headings propagated to vertex {vertex} along different "
            "edges disagree; the angle set is infeasible (assumption 2)"
        )


class NoCommonTargetError(ScenarioError):
    def __init__(self, agent: int, distance: float):
        self.agent = agent
        self.distance = distance
        super().__init__(
            f"agent {agent}'s desired-heading ray misses the common target by "
            f"{distance:.3e} m; the angle set is infeasible (assumption 2)"
        )


class TargetBehindAgentError(ScenarioError):
    def __init__(self, agent: int):
        self.agent = agent
        super().__init__(
            f"the common target lies behind agent {agent}; its desired heading "
            "points away from it (assumption 2)"
        )


class AntipodalRootHeadingError(ScenarioError):
    def __init__(self):
        super().__init__(
            "the root's initial heading is antipodal to its desired heading, "
            "an unstable equilibrium excluded by assumption 3"
        )


class DegenerateFirstAngleError(ScenarioError):
    def __init__(self, alpha: float):
        self.alpha = alpha
        super().__init__(
            f"the first follower's desired angle {alpha!r} rad is 0 or pi, so "
            "the target cannot be determined; excluded by assumption 3"
        )


@dataclass(frozen=True)
class FeasibilityCertificate:
    """Common target and the per-agent desired headings it induces."""

    target: np.ndarray            # (2,)
    desired_headings: np.ndarray  # (n, 2); row i-1 holds agent i's heading

    def __post_init__(self):
        object.__setattr__(self, "target", np.array(self.target, dtype=float))
        object.__setattr__(
            self, "desired_headings", np.array(self.desired_headings, dtype=float)
        )
        self.target.flags.writeable = False
        self.desired_headings.flags.writeable = False


@dataclass(frozen=True, eq=False)
class Scenario:
    """A complete pointing-consensus problem instance.

    ``desired_angles`` maps each graph edge ``(j, i)`` to the angle agent i's
    heading must make with agent j's heading.  ``seed`` records the PRNG seed
    when the initial headings were sampled rather than given.
    """

    positions: np.ndarray               # (n, 2) agent positions, m
    graph: Digraph
    root_desired_heading: np.ndarray    # (2,) unit
    desired_angles: dict[tuple[int, int], float]
    initial_headings: np.ndarray        # (n, 2) unit rows
    root: int = 1
    name: str = "scenario"
    seed: int | None = None

    def __post_init__(self):
        positions = np.array(self.positions, dtype=float)
        headings = np.asarray(self.initial_headings, dtype=float)
        n = self.graph.n
        if positions.shape != (n, 2):
            raise ScenarioError(
                f"expected {n} agent positions of dimension 2, got array of "
                f"shape {positions.shape}"
            )
        if headings.shape != (n, 2):
            raise ScenarioError(
                f"expected {n} initial headings of dimension 2, got array of "
                f"shape {headings.shape}"
            )
        headings = np.array([unit(h) for h in headings])
        root_heading = unit(self.root_desired_heading)

        ensure_rooted_out_branching(self.graph, self.root)

        angles = {}
        for edge, alpha in self.desired_angles.items():
            j, i = int(edge[0]), int(edge[1])
            angles[(j, i)] = wrap_angle(float(alpha))
        missing = set(self.graph.edges) - set(angles)
        extra = set(angles) - set(self.graph.edges)
        if missing:
            raise ScenarioError(f"edges {sorted(missing)} have no desired angle")
        if extra:
            raise ScenarioError(f"desired angles given for non-edges {sorted(extra)}")

        # assumption 3: the root must not start antipodal to its desired
        # heading, and the first follower's angle must not be 0 or pi.
        if float(headings[self.root - 1] @ root_heading) <= -1.0 + ANTIPODAL_TOL:
            raise AntipodalRootHeadingError()
        order = topological_order(self.graph)
        if n > 1:
            first = order[1]
            alpha = angles[(self.root, first)]
            if min(abs(alpha), math.pi - abs(alpha)) <= DEGENERATE_ANGLE_TOL:
                raise DegenerateFirstAngleError(alpha)

        positions.flags.writeable = False
        headings.flags.writeable = False
        root_heading.flags.writeable = False
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "initial_headings", headings)
        object.__setattr__(self, "root_desired_heading", root_heading)
        object.__setattr__(self, "desired_angles", angles)
        object.__setattr__(self, "root", int(self.root))
        object.__setattr__(self, "_topo_order", order)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def topo_order(self) -> tuple[int, ...]:
        return self._topo_order

    @property
    def first_follower(self) -> int | None:
        """First non-root vertex in cascade order (None for a lone root)."""
        return self._topo_order[1] if self.n > 1 else None


def synthesize_angles(positions, graph: Digraph, target, root: int = 1):
    """Derive desired angles that make all agents point at ``target``.

    Returns ``(root_desired_heading, desired_angles, certificate)``.  Each
    agent's desired heading is the unit bearing from its position to the
    target; each edge's angle is the signed angle between the two bearings,
    so the certificate is feasible by construction.
    """
    positions = np.asarray(positions, dtype=float)
    target = np.asarray(target, dtype=float)
    bearings = np.empty_like(positions)
    for idx in range(positions.shape[0]):
        d = target - positions[idx]
        if math.hypot(d[0], d[1]) <= MIN_TARGET_DISTANCE:
            raise TargetCoincidesWithAgentError(idx + 1)
        bearings[idx] = unit(d)
    angles = {
        (j, i): angle_between(bearings[j - 1], bearings[i - 1])
        for j, i in graph.edges
    }
    cert = FeasibilityCertificate(target, bearings)
    return bearings[root - 1].copy(), angles, cert


def recover_target(p1, p2, b1s, b2s) -> np.ndarray:
    """Intersection of the two lines through ``p1, p2`` along ``b1s, b2s``.

    Solves ``(P_b1 + P_b2) x = P_b1 p1 + P_b2 p2`` where ``P_b`` is the
    orthogonal projector; raises SingularMatrixError for (anti)parallel
    headings, which assumption 3 excludes.
    """
    pr1 = projector(b1s)
    pr2 = projector(b2s)
    rhs = pr1 @ np.asarray(p1, dtype=float) + pr2 @ np.asarray(p2, dtype=float)
    return solve_2x2(pr1 + pr2, rhs)


def check_feasibility(scenario: Scenario) -> FeasibilityCertificate:
    """Verify that the scenario's angle set encodes one common target.

    Desired headings are propagated from the root along the cascade order;
    when a vertex receives from several in-neighbors, all propagated values
    must agree (within 1e-9) and the one coming from the smallest-id neighbor
    is kept.  The target is then recovered from the root and the first
    follower, and every agent's desired-heading ray must pass within 1e-6 m
    of it, on the forward side.
    """
    n = scenario.n
    root = scenario.root
    bstar = np.zeros((n, 2))
    bstar[root - 1] = scenario.root_desired_heading
    for v in scenario.topo_order[1:]:
        candidates = [
            rotation(scenario.desired_angles[(j, v)]) @ bstar[j - 1]
            for j in scenario.graph.in_neighbors(v)
        ]
        chosen = candidates[0]
        for other in candidates[1:]:
            if math.hypot(other[0] - chosen[0], other[1] - chosen[1]) > PROPAGATION_TOL:
                raise InconsistentAnglesError(v)
        bstar[v - 1] = chosen

    if n == 1:
        # one agent: any point on its ray works; pick unit range
        target = scenario.positions[0] + bstar[0]
        return FeasibilityCertificate(target, bstar)

    follower = scenario.first_follower
    target = recover_target(
        scenario.positions[root - 1],
        scenario.positions[follower - 1],
        bstar[root - 1],
        bstar[follower - 1],
    )
    for idx in range(n):
        offset = target - scenario.positions[idx]
        miss = projector(bstar[idx]) @ offset
        dist = math.hypot(miss[0], miss[1])
        if dist > RAY_TOL:
            raise NoCommonTargetError(idx + 1, dist)
    for idx in range(n):
        if float((target - scenario.positions[idx]) @ bstar[idx]) <= 0.0:
            raise TargetBehindAgentError(idx + 1)
    return FeasibilityCertificate(target, bstar)


def sample_initial_headings(n: int, rng, root_desired_heading) -> np.ndarray:
    """Draw ``n`` headings uniformly on the circle from ``rng``.

    The root's draw is repeated (up to 100 times) while it lands antipodal to
    the desired heading, so the sampled scenario satisfies assumption 3.
    ``rng`` may be a seed or a ``numpy.random.Generator``.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    theta = rng.uniform(0.0, TAU, size=n)
    headings = np.column_stack([np.cos(theta), np.sin(theta)])
    b1s = unit(root_desired_heading)
    tries = 0
    while float(headings[0] @ b1s) <= -1.0 + ANTIPODAL_TOL:
        tries += 1
        if tries > _SAMPLE_RETRIES:
            raise ScenarioError(
                "could not sample a root heading compatible with assumption 3"
            )
        t = rng.uniform(0.0, TAU)
        headings[0] = (math.cos(t), math.sin(t))
    return headings


def scenario_from_dict(data: dict, *, name: str = "scenario", seed=None,
                       rng=None) -> Scenario:
    """Build a Scenario from parsed file data (see the schema in the README).

    ``seed`` overrides the file's ``seed`` field; it cannot be combined with
    explicit ``initial_headings``.  When ``rng`` is given it supplies the
    heading draws (callers can keep consuming it for further seeded choices);
    otherwise a generator is created from the effective seed.
    """
    try:
        positions = np.asarray(data["positions"], dtype=float)
        edges = tuple((int(j), int(i)) for j, i in data["edges"])
        root = int(data["root"])
    except KeyError as exc:
        raise ScenarioError(f"scenario file is missing required field {exc}") from exc
    if positions.ndim != 2 or positions.shape[1] != 2:
        raise ScenarioError("positions must be an array of [x, y] pairs")
    graph = Digraph(len(positions), edges)

    has_target = "target" in data
    has_angles = "root_heading" in data or "angles" in data
    if has_target == has_angles:
        raise ScenarioError(
            "scenario file must contain exactly one of 'target' or "
            "'root_heading' + 'angles'"
        )
    if has_target:
        root_heading, angles, _ = synthesize_angles(
            positions, graph, np.asarray(data["target"], dtype=float), root=root
        )
    else:
        if "root_heading" not in data or "angles" not in data:
            raise ScenarioError("'root_heading' and 'angles' must be given together")
        root_heading = unit(np.asarray(data["root_heading"], dtype=float))
        angles = {(int(j), int(i)): float(alpha) for j, i, alpha in data["angles"]}

    has_headings = "initial_headings" in data
    file_seed = data.get("seed")
    if has_headings and file_seed is not None:
        raise ScenarioError(
            "scenario file must contain exactly one of 'initial_headings' or 'seed'"
        )
    if has_headings:
        if seed is not None:
            raise ScenarioError(
                "scenario provides explicit initial headings; a seed does not apply"
            )
        initial = np.asarray(data["initial_headings"], dtype=float)
        used_seed = None
    else:
        if seed is None:
            seed = file_seed
        if seed is None:
            raise ScenarioError(
                "scenario gives no initial headings; provide 'seed' in the file "
                "or on the command line"
            )
        used_seed = int(seed)
        if used_seed < 0:
            raise ScenarioError("seed must be a nonnegative integer")
        if rng is None:
            rng = np.random.default_rng(used_seed)
        initial = sample_initial_headings(len(positions), rng, root_heading)

    return Scenario(
        positions=positions,
        graph=graph,
        root_desired_heading=root_heading,
        desired_angles=angles,
        initial_headings=initial,
        root=root,
        name=data.get("name", name),
        seed=used_seed,
    )


def load_scenario(path, *, seed=None) -> Scenario:
    """Load a scenario from a JSON file (schema documented in the README)."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(data, name=path.stem, seed=seed)


def scenario_to_dict(scenario: Scenario) -> dict:
    """Canonical JSON-ready form (always angle-based, explicit headings)."""
    return {
        "name": scenario.name,
        "positions": [[float(x), float(y)] for x, y in scenario.positions],
        "edges": [[j, i] for j, i in scenario.graph.edges],
        "root": scenario.root,
        "root_heading": [float(v) for v in scenario.root_desired_heading],
        "angles": [
            [j, i, float(alpha)]
            for (j, i), alpha in sorted(scenario.desired_angles.items())
        ],
        "initial_headings": [[float(x), float(y)] for x, y in scenario.initial_headings],
    }


def scenario_hash(scenario: Scenario) -> str:
    """SHA-256 over the canonical serialized scenario (identifies a run setup)."""
    blob = json.dumps(scenario_to_dict(scenario), sort_keys=True, allow_nan=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
