"""Directed communication topologies.

A :class:`Digraph` stores edges ``(j, i)`` meaning vertex ``i`` receives
information from vertex ``j``.  The control analysis needs the graph to be a
rooted out-branching (every vertex reachable from the root) and acyclic, so
the agents can be processed in a cascade order; :func:`validate_rooted_out_branching`
checks both and :func:`topological_order` produces the order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import cached_property


class GraphError(ValueError):
    """Structurally invalid graph (bad vertex ids, self-loops, duplicates)."""


class UnreachableVertexError(GraphError):
    def __init__(self, vertices):
        self.vertices = tuple(vertices)
        super().__init__(
            f"vertices {list(self.vertices)} are not reachable from the root; "
            "the communication graph must be a rooted out-branching (assumption 1)"
        )


class CycleDetectedError(GraphError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        path = "->".join(str(v) for v in self.cycle)
        super().__init__(
            f"communication graph contains the directed cycle {path}; "
            "a rooted out-branching must be acyclic (assumption 1)"
        )


@dataclass(frozen=True)
class Digraph:
    """Directed graph on vertices ``1..n``; edge ``(j, i)``: i receives from j."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if int(self.n) < 1:
            raise GraphError(f"vertex count must be >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        seen = set()
        norm = []
        for edge in self.edges:
            j, i = int(edge[0]), int(edge[1])
            if not (1 <= j <= self.n and 1 <= i <= self.n):
                raise GraphError(f"edge ({j},{i}) uses vertex ids outside 1..{self.n}")
            if j == i:
                raise GraphError(f"self-loop ({j},{i}) is not allowed")
            if (j, i) in seen:
                raise GraphError(f"duplicate edge ({j},{i})")
            seen.add((j, i))
            norm.append((j, i))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @cached_property
    def _in(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {v: [] for v in range(1, self.n + 1)}
        for j, i in self.edges:
            adj[i].append(j)
        return {v: tuple(sorted(js)) for v, js in adj.items()}

    @cached_property
    def _out(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {v: [] for v in range(1, self.n + 1)}
        for j, i in self.edges:
            adj[j].append(i)
        return {v: tuple(sorted(js)) for v, js in adj.items()}

    def in_neighbors(self, i: int) -> tuple[int, ...]:
        """Vertices whose heading vertex ``i`` receives, ascending."""
        return self._in[i]

    def out_neighbors(self, j: int) -> tuple[int, ...]:
        return self._out[j]


@dataclass(frozen=True)
class ValidationResult:
    """Outcome of the rooted-out-branching check; both defects may coexist."""

    unreachable: tuple[int, ...]
    cycle: tuple[int, ...] | None

    @property
    def ok(self) -> bool:
        return not self.unreachable and self.cycle is None


def _find_cycle(g: Digraph) -> tuple[int, ...] | None:
    """First directed cycle by DFS in ascending vertex order, or None.

    Returned as a closed path (v0, ..., v0).
    """
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in range(1, g.n + 1)}
    parent: dict[int, int] = {}
    for start in range(1, g.n + 1):
        if color[start] != WHITE:
            continue
        color[start] = GRAY
        stack = [(start, iter(g.out_neighbors(start)))]
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if color[w] == WHITE:
                    color[w] = GRAY
                    parent[w] = v
                    stack.append((w, iter(g.out_neighbors(w))))
                    advanced = True
                    break
                if color[w] == GRAY:
                    path = [v]
                    while path[-1] != w:
                        path.append(parent[path[-1]])
                    path.reverse()
                    return tuple(path + [path[0]])
            if not advanced:
                color[v] = BLACK
                stack.pop()
    return None


def validate_rooted_out_branching(g: Digraph, root: int) -> ValidationResult:
    """Check that every vertex is reachable from ``root`` and no cycle exists.

    Reachability is the defining property of a rooted out-branching;
    acyclicity is required on top of it so that a cascade (topological)
    ordering of the agents exists.
    """
    if not 1 <= root <= g.n:
        raise GraphError(f"root {root} outside 1..{g.n}")
    visited = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        for w in g.out_neighbors(v):
            if w not in visited:
                visited.add(w)
                stack.append(w)
    unreachable = tuple(v for v in range(1, g.n + 1) if v not in visited)
    return ValidationResult(unreachable, _find_cycle(g))


def ensure_rooted_out_branching(g: Digraph, root: int) -> None:
    """Raise the first defect found by :func:`validate_rooted_out_branching`."""
    result = validate_rooted_out_branching(g, root)
    if result.unreachable:
        raise UnreachableVertexError(result.unreachable)
    if result.cycle is not None:
        raise CycleDetectedError(result.cycle)


def topological_order(g: Digraph) -> tuple[int, ...]:
    """Vertex order placing every vertex after all of its in-neighbors.

    Deterministic: ties are broken by ascending vertex id, so the root of a
    validated rooted out-branching always comes first.  Raises
    CycleDetectedError on cyclic graphs.
    """
    indeg = {v: 0 for v in range(1, g.n + 1)}
    for _, i in g.edges:
        indeg[i] += 1
    heap = [v for v, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in g.out_neighbors(v):
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if len(order) < g.n:
        raise CycleDetectedError(_find_cycle(g))
    return tuple(order)
