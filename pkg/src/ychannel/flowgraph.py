"""Message-flow graphs on the three users and their cycles.

On 3 nodes only five directed cycles exist: the 2-cycles (1,2), (1,3),
(2,3) and the 3-cycles (1,2,3), (1,3,2). Enumeration checks these five
candidates directly instead of running a generic cycle search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .dof import USERS, DofTuple
from .region import RegionBound

TWO_CYCLES = ((1, 2), (1, 3), (2, 3))
THREE_CYCLES = ((1, 2, 3), (1, 3, 2))


@dataclass(frozen=True)
class CycleId:
    """A directed cycle, stored with the smallest vertex first.

    Cycles are identified up to cyclic shift, e.g. (2,3,1) names the same
    cycle as (1,2,3).
    """

    vertices: tuple[int, ...]

    def __post_init__(self):
        v = self.vertices
        if len(v) not in (2, 3) or len(set(v)) != len(v) or not set(v) <= set(USERS):
            raise ValueError(f"not a cycle on 3 nodes: {v}")
        k = v.index(min(v))
        object.__setattr__(self, "vertices", v[k:] + v[:k])

    @property
    def kind(self) -> str:
        return "two-cycle" if len(self.vertices) == 2 else "three-cycle"

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        v = self.vertices
        return tuple((v[k], v[(k + 1) % len(v)]) for k in range(len(v)))


ALL_CYCLES = tuple(CycleId(c) for c in TWO_CYCLES + THREE_CYCLES)


@dataclass(frozen=True)
class FlowGraph:
    """Directed demand graph: an edge (i,j) per strictly positive component."""

    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...]

    def weight(self, i: int, j: int) -> float:
        for edge, w in zip(self.edges, self.weights):
            if edge == (i, j):
                return w
        return 0.0

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.edges


def build_flow_graph(d: DofTuple) -> FlowGraph:
    """Graph with an edge per positive demand component, weighted by it."""
    edges = []
    weights = []
    for (i, j), w in zip(
        ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)), d.as_tuple()
    ):
        if w > 0:
            edges.append((i, j))
            weights.append(w)
    return FlowGraph(tuple(edges), tuple(weights))


def enumerate_cycles(g: FlowGraph) -> list[CycleId]:
    """Every 2- and 3-cycle whose edges are all present in ``g``.

    Deterministic order: 2-cycles lexicographically, then (1,2,3), then
    (1,3,2).
    """
    return [c for c in ALL_CYCLES if all(g.has_edge(i, j) for i, j in c.edges)]


class BoundProperties(NamedTuple):
    edge_count: int
    has_cycles: bool


def check_bound_properties(bound: RegionBound) -> BoundProperties:
    """Edge count and cycle content of a region bound's index pattern.

    Every permutation bound sums three distinct components whose pattern
    graph is acyclic, which is why a scheme whose sub-channel count takes
    that shape fits within the relay's dimensions.
    """
    g = FlowGraph(bound.pairs, (1.0,) * len(bound.pairs))
    return BoundProperties(len(bound.pairs), bool(enumerate_cycles(g)))
