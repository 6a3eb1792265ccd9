import json

import numpy as np
import pytest

from helpers import all_matchings, brute_force_max_weight, random_connected_graph, random_weights
from umwsim.errors import CapExceededError, TopologyError
from umwsim.topology import (
    ActivationSet,
    Graph,
    builtin_topology,
    enumerate_matchings,
    load_activation,
    load_topology,
    save_topology,
    validate_activation,
)


def test_smallest_graph(tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps({"directed": False, "nodes": 2, "edges": [[0, 1]]}))
    g = load_topology(path)
    assert g.node_count == 2 and g.m == 1 and not g.directed


def test_self_loop_rejected(tmp_path):
    path = tmp_path / "loop.json"
    path.write_text(json.dumps({"nodes": 4, "edges": [[3, 3]]}))
    with pytest.raises(TopologyError):
        load_topology(path)


def test_duplicate_edge_rejected():
    with pytest.raises(TopologyError):
        Graph(3, ((0, 1), (1, 0)))
    # directed graphs may carry both orientations
    Graph(3, ((0, 1), (1, 0)), directed=True)


def test_bad_node_id_rejected():
    with pytest.raises(TopologyError):
        Graph(2, ((0, 2),))


def test_malformed_file_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{nope")
    with pytest.raises(TopologyError):
        load_topology(path)
    path.write_text(json.dumps({"nodes": 2}))
    with pytest.raises(TopologyError):
        load_topology(path)


def test_round_trip_identical(tmp_path):
    g = Graph(5, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)))
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_topology(g, p1)
    g2 = load_topology(p1)
    assert g2 == g
    save_topology(g2, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_round_trip_with_activation(tmp_path):
    g = Graph(3, ((0, 1), (1, 2)))
    aset = ActivationSet("explicit", 2, (frozenset({0}), frozenset({1})))
    path = tmp_path / "net.json"
    save_topology(g, path, aset)
    g2 = load_topology(path)
    a2 = load_activation(path, g2)
    assert a2.kind == "explicit" and a2.members == aset.members


def test_grid_builtin_shape():
    g, aset, classes = builtin_topology("grid3x3_broadcast")
    # a 3x3 lattice has 2*3*2 = 12 edges, counted by hand
    assert g.node_count == 9 and g.m == 12
    assert classes[0].kind == "broadcast" and classes[0].source == 0
    # every activation member is a matching of the grid
    validate_activation(aset, g)
    for member in aset.members:
        nodes = [n for e in member for n in g.edges[e]]
        assert len(nodes) == len(set(nodes))


def test_line3_builtin():
    g, aset, classes = builtin_topology("line3")
    assert g.node_count == 3 and g.m == 2 and aset.kind == "wired"
    assert classes[0].destinations == frozenset({2})


def test_twinpath_builtin_structure():
    g, aset, classes = builtin_topology("twinpath_unicast")
    assert g.node_count == 8 and aset.kind == "wired"
    assert [c.rate for c in classes] == [2.0, 1.0]


def test_unknown_builtin():
    with pytest.raises(TopologyError):
        builtin_topology("mystery9")


def test_enumerate_matchings_single_edge():
    aset = enumerate_matchings(Graph(2, ((0, 1),)))
    assert aset.members == (frozenset({0}),)


def test_enumerate_matchings_triangle():
    aset = enumerate_matchings(Graph(3, ((0, 1), (1, 2), (2, 0))))
    assert set(aset.members) == {frozenset({0}), frozenset({1}), frozenset({2})}


def test_enumerate_matchings_four_cycle():
    aset = enumerate_matchings(Graph(4, ((0, 1), (1, 2), (2, 3), (3, 0))))
    assert set(aset.members) == {frozenset({0, 2}), frozenset({1, 3})}


def test_matching_cap():
    g = Graph(6, tuple((u, v) for u in range(6) for v in range(u + 1, 6)))
    with pytest.raises(CapExceededError):
        enumerate_matchings(g, cap=10)


def test_maximal_matchings_cover_all_max_weights():
    # max over maximal matchings == max over all matchings, any w >= 0
    rng = np.random.default_rng(42)
    for _ in range(25):
        g = random_connected_graph(rng)
        aset = enumerate_matchings(g)
        members = set(aset.members)
        assert members <= set(all_matchings(g))
        for _ in range(4):
            w = random_weights(rng, g.m)
            best = max(sum(w[e] for e in s) for s in aset.members)
            assert best == brute_force_max_weight(g, w)


def test_activation_set_validation():
    with pytest.raises(TopologyError):
        ActivationSet("explicit", 2, ())
    with pytest.raises(TopologyError):
        ActivationSet("explicit", 2, (frozenset({5}),))
    with pytest.raises(TopologyError):
        ActivationSet("wired", 2, (frozenset({0}),))
    g = Graph(3, ((0, 1), (1, 2)))
    bad = ActivationSet("primary_interference", 2, (frozenset({0, 1}),))
    with pytest.raises(TopologyError):
        validate_activation(bad, g)
