import itertools

import numpy as np
import pytest

from heading_consensus.graph import (
    CycleDetectedError,
    Digraph,
    GraphError,
    UnreachableVertexError,
    ensure_rooted_out_branching,
    topological_order,
    validate_rooted_out_branching,
)

from helpers import oracle_acyclic, oracle_reaches_all, random_rooted_out_branching

HEXAGON_EDGES = ((1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (4, 6), (1, 6), (5, 6))


def test_structural_validation():
    with pytest.raises(GraphError):
        Digraph(0, ())
    with pytest.raises(GraphError):
        Digraph(3, ((1, 1),))
    with pytest.raises(GraphError):
        Digraph(3, ((1, 2), (1, 2)))
    with pytest.raises(GraphError):
        Digraph(3, ((1, 4),))


def test_single_vertex_valid():
    assert validate_rooted_out_branching(Digraph(1, ()), 1).ok


def test_hexagon_valid():
    assert validate_rooted_out_branching(Digraph(6, HEXAGON_EDGES), 1).ok


def test_disconnected_cycle_reports_both_defects():
    g = Digraph(3, ((2, 3), (3, 2)))
    result = validate_rooted_out_branching(g, 1)
    assert not result.ok
    assert result.unreachable == (2, 3)
    assert result.cycle is not None
    assert result.cycle[0] == result.cycle[-1]
    assert set(result.cycle) == {2, 3}
    with pytest.raises(UnreachableVertexError):
        ensure_rooted_out_branching(g, 1)


def test_ensure_raises_cycle_when_reachable():
    g = Digraph(2, ((1, 2), (2, 1)))
    with pytest.raises(CycleDetectedError) as err:
        ensure_rooted_out_branching(g, 1)
    assert "assumption 1" in str(err.value)


def test_topological_order_chain():
    assert topological_order(Digraph(3, ((1, 2), (2, 3)))) == (1, 2, 3)


def test_topological_order_hexagon():
    assert topological_order(Digraph(6, HEXAGON_EDGES)) == (1, 2, 3, 4, 5, 6)


def test_topological_order_star():
    assert topological_order(Digraph(4, ((1, 2), (1, 3), (1, 4)))) == (1, 2, 3, 4)


def test_topological_order_tie_break_is_ascending():
    # both 2 and 3 become available after 1; ascending ids win
    g = Digraph(4, ((1, 3), (1, 2), (3, 4), (2, 4)))
    assert topological_order(g) == (1, 2, 3, 4)


def test_topological_order_rejects_cycles():
    with pytest.raises(CycleDetectedError):
        topological_order(Digraph(3, ((1, 2), (2, 3), (3, 1))))


def test_topological_order_respects_edges_random():
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(2, 9))
        g = random_rooted_out_branching(rng, n)
        order = topological_order(g)
        pos = {v: k for k, v in enumerate(order)}
        assert order[0] == 1
        for j, i in g.edges:
            assert pos[j] < pos[i]


def _all_digraphs(n):
    pairs = [(j, i) for j in range(1, n + 1) for i in range(1, n + 1) if j != i]
    for r in range(len(pairs) + 1):
        for combo in itertools.combinations(pairs, r):
            yield combo


def test_validator_matches_oracle_exhaustive_small():
    # full enumeration up to n=4 (the acceptance suite covers n=5)
    for n in (1, 2, 3, 4):
        for edges in _all_digraphs(n):
            g = Digraph(n, edges)
            expected = oracle_reaches_all(n, edges, 1) and oracle_acyclic(n, edges)
            assert validate_rooted_out_branching(g, 1).ok == expected, (n, edges)


def test_validator_reports_actual_cycle():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(1, n * (n - 1) + 1))
        pairs = [(j, i) for j in range(1, n + 1) for i in range(1, n + 1) if j != i]
        idx = rng.choice(len(pairs), size=m, replace=False)
        edges = tuple(pairs[k] for k in idx)
        result = validate_rooted_out_branching(Digraph(n, edges), 1)
        if result.cycle is not None:
            cyc = result.cycle
            assert cyc[0] == cyc[-1] and len(cyc) >= 3
            for a, b in zip(cyc, cyc[1:]):
                assert (a, b) in edges
