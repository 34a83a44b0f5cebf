from itertools import permutations

import pytest

import ychannel as yc
from ychannel.dof import DofTuple
from ychannel.flowgraph import ALL_CYCLES, CycleId, build_flow_graph, enumerate_cycles
from ychannel.region import RegionBound


def test_toy_graph_edges():
    g = build_flow_graph(DofTuple(2, 0, 1, 1, 1, 0))
    assert set(g.edges) == {(1, 2), (2, 1), (2, 3), (3, 1)}
    assert g.weight(1, 2) == 2
    assert g.weight(3, 1) == 1
    assert g.weight(1, 3) == 0


def test_zero_tuple_graph_is_empty():
    assert build_flow_graph(DofTuple.zero()).edges == ()


def test_positive_components_only():
    g = build_flow_graph(DofTuple(1, 1, 0, 0, 0, 0))
    assert set(g.edges) == {(1, 2), (1, 3)}


def test_cycle_canonicalization():
    assert CycleId((2, 3, 1)).vertices == (1, 2, 3)
    assert CycleId((3, 1, 2)).vertices == (1, 2, 3)
    assert CycleId((3, 2, 1)).vertices == (1, 3, 2)
    assert CycleId((2, 1)).vertices == (1, 2)
    assert CycleId((1, 2)).kind == "two-cycle"
    assert CycleId((1, 2, 3)).kind == "three-cycle"
    with pytest.raises(ValueError):
        CycleId((1, 1))
    with pytest.raises(ValueError):
        CycleId((1,))


def test_cycle_edges():
    assert CycleId((1, 2, 3)).edges == ((1, 2), (2, 3), (3, 1))
    assert CycleId((1, 3, 2)).edges == ((1, 3), (3, 2), (2, 1))
    assert CycleId((1, 2)).edges == ((1, 2), (2, 1))


def test_toy_graph_cycles():
    cycles = enumerate_cycles(build_flow_graph(DofTuple(2, 0, 1, 1, 1, 0)))
    assert cycles == [CycleId((1, 2)), CycleId((1, 2, 3))]


def test_bound_pattern_graphs_have_no_cycles():
    for p in permutations((1, 2, 3)):
        bound = RegionBound(p, 3)
        g = yc.FlowGraph(bound.pairs, (1.0,) * 3)
        assert enumerate_cycles(g) == []


def test_complete_graph_has_all_five_cycles():
    g = build_flow_graph(DofTuple(1, 1, 1, 1, 1, 1))
    assert enumerate_cycles(g) == list(ALL_CYCLES)
    assert len(ALL_CYCLES) == 5


def test_enumeration_order_is_deterministic():
    g = build_flow_graph(DofTuple(1, 1, 1, 1, 1, 1))
    verts = [c.vertices for c in enumerate_cycles(g)]
    assert verts == [(1, 2), (1, 3), (2, 3), (1, 2, 3), (1, 3, 2)]


@pytest.mark.parametrize("p", list(permutations((1, 2, 3))))
def test_every_bound_has_three_edges_and_no_cycles(p):
    props = yc.check_bound_properties(RegionBound(p, 3))
    assert props.edge_count == 3
    assert props.has_cycles is False
