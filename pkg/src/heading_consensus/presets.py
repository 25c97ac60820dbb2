"""Built-in reproduction scenarios.

Two families: six agents on a regular hexagon pointing at the origin (and the
variant whose root heading is rotated off-target), and three agents on an
equilateral triangle pointing at its center, the unique point where all three
headings subtend 2*pi/3 (and the variant with the root rotated by 0.3 rad).
The misdirected variants still satisfy every desired angle asymptotically but
the heading rays no longer meet in one point.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import rotation
from .graph import Digraph
from .scenario import Scenario, sample_initial_headings

DEFAULT_SEED = 42

_SQ3 = math.sqrt(3.0)

HEXAGON_POSITIONS = np.array([
    [2.0, 0.0],
    [1.0, _SQ3],
    [-1.0, _SQ3],
    [-2.0, 0.0],
    [-1.0, -_SQ3],
    [1.0, -_SQ3],
])

# Edge (4,5) with angle pi/3 closes the otherwise-orphaned vertex 5 so the
# graph is rooted at vertex 1; the angle matches the hexagon geometry.
HEXAGON_EDGES = ((1, 2), (1, 3), (1, 6), (2, 3), (3, 4), (4, 5), (4, 6), (5, 6))
HEXAGON_ANGLES = {
    (1, 2): math.pi / 3,
    (2, 3): math.pi / 3,
    (3, 4): math.pi / 3,
    (5, 6): math.pi / 3,
    (4, 5): math.pi / 3,
    (1, 3): 2 * math.pi / 3,
    (4, 6): 2 * math.pi / 3,
    (1, 6): -math.pi / 3,
}

TORRICELLI_POSITIONS = np.array([
    [1.0, 0.0],
    [-0.5, _SQ3 / 2],
    [-0.5, -_SQ3 / 2],
])
TORRICELLI_EDGES = ((1, 2), (1, 3), (2, 3))
TORRICELLI_ANGLES = {
    (1, 2): 2 * math.pi / 3,
    (2, 3): 2 * math.pi / 3,
    (1, 3): -2 * math.pi / 3,
}


def _build(name, positions, edges, angles, root_heading, seed) -> Scenario:
    graph = Digraph(len(positions), edges)
    root_heading = np.asarray(root_heading, dtype=float)
    return Scenario(
        positions=positions,
        graph=graph,
        root_desired_heading=root_heading,
        desired_angles=angles,
        initial_headings=sample_initial_headings(len(positions), seed, root_heading),
        name=name,
        seed=seed,
    )


def hexagon(seed: int = DEFAULT_SEED) -> Scenario:
    """Six agents on a regular hexagon, root aimed at the origin."""
    return _build("hexagon", HEXAGON_POSITIONS, HEXAGON_EDGES, HEXAGON_ANGLES,
                  [-1.0, 0.0], seed)


def hexagon_misdirected(seed: int = DEFAULT_SEED) -> Scenario:
    """Hexagon with the root heading 45 degrees off the origin bearing."""
    return _build("hexagon-misdirected", HEXAGON_POSITIONS, HEXAGON_EDGES,
                  HEXAGON_ANGLES, [-math.sqrt(2) / 2, math.sqrt(2) / 2], seed)


def torricelli(seed: int = DEFAULT_SEED) -> Scenario:
    """Equilateral triangle (unit circumradius), root aimed at the center."""
    return _build("torricelli", TORRICELLI_POSITIONS, TORRICELLI_EDGES,
                  TORRICELLI_ANGLES, [-1.0, 0.0], seed)


def torricelli_misdirected(seed: int = DEFAULT_SEED) -> Scenario:
    """Triangle with the root heading rotated 0.3 rad off the center bearing."""
    return _build("torricelli-misdirected", TORRICELLI_POSITIONS, TORRICELLI_EDGES,
                  TORRICELLI_ANGLES, rotation(0.3) @ np.array([-1.0, 0.0]), seed)


PRESETS = {
    "hexagon": hexagon,
    "hexagon-misdirected": hexagon_misdirected,
    "torricelli": torricelli,
    "torricelli-misdirected": torricelli_misdirected,
}
