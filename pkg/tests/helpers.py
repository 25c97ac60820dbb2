"""Shared test machinery: random instances and brute-force graph oracles."""

import numpy as np

from heading_consensus import Digraph, Scenario, synthesize_angles, topological_order
from heading_consensus.geometry import TAU, unit_from_angle


def random_unit(rng):
    return unit_from_angle(rng.uniform(0.0, TAU))


def random_rooted_out_branching(rng, n, p_extra=0.3):
    """Random acyclic digraph in which every vertex is reachable from vertex 1.

    Grows a random attachment tree over a shuffled vertex order, then adds
    extra edges that respect the attachment order (keeping it acyclic).
    """
    order = [1] + [int(v) for v in rng.permutation(np.arange(2, n + 1))]
    edges = set()
    for idx in range(1, n):
        parent = order[int(rng.integers(0, idx))]
        edges.add((parent, order[idx]))
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p_extra:
                edges.add((order[a], order[b]))
    return Digraph(n, tuple(sorted(edges)))


def random_feasible_instance(rng, n, box=10.0, min_target_dist=1.0,
                             max_initial_offset=3.0, degeneracy_margin=1e-3):
    """Random positions + planted target + synthesized angles, as a Scenario.

    Initial headings sit within ``max_initial_offset`` rad of each agent's
    desired heading (well away from the unstable antipodal equilibrium), and
    instances whose first-follower angle is within ``degeneracy_margin`` of
    {0, pi} are redrawn.

    Returns ``(scenario, target)``.
    """
    graph = random_rooted_out_branching(rng, n)
    while True:
        positions = rng.uniform(-box, box, size=(n, 2))
        target = rng.uniform(-box, box, size=2)
        if np.min(np.linalg.norm(positions - target, axis=1)) < min_target_dist:
            continue
        root_heading, angles, cert = synthesize_angles(positions, graph, target)
        first_follower = topological_order(graph)[1]
        alpha21 = angles[(1, first_follower)]
        if min(abs(alpha21), np.pi - abs(alpha21)) < degeneracy_margin:
            continue
        break
    theta_star = np.arctan2(cert.desired_headings[:, 1], cert.desired_headings[:, 0])
    theta0 = theta_star + rng.uniform(-max_initial_offset, max_initial_offset, size=n)
    initial = np.column_stack([np.cos(theta0), np.sin(theta0)])
    scenario = Scenario(
        positions=positions,
        graph=graph,
        root_desired_heading=root_heading,
        desired_angles=angles,
        initial_headings=initial,
        name=f"random-{n}",
    )
    return scenario, target


def oracle_reaches_all(n, edges, root):
    """Brute-force reachability: saturate marks over the raw edge list."""
    reached = [False] * (n + 1)
    reached[root] = True
    changed = True
    while changed:
        changed = False
        for j, i in edges:
            if reached[j] and not reached[i]:
                reached[i] = True
                changed = True
    return all(reached[1:])


def oracle_acyclic(n, edges):
    """Brute-force acyclicity: peel zero-in-degree vertices until stuck."""
    indeg = [0] * (n + 1)
    outs = [[] for _ in range(n + 1)]
    for j, i in edges:
        indeg[i] += 1
        outs[j].append(i)
    peel = [v for v in range(1, n + 1) if indeg[v] == 0]
    removed = 0
    while peel:
        v = peel.pop()
        removed += 1
        for w in outs[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                peel.append(w)
    return removed == n
