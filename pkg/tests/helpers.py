"""Shared test utilities: random graph generation and brute-force oracles.

The brute-force routines here (and the subset enumeration in
umwsim.capacity) are the independent references the solvers are checked
against; they never call the code paths under test.
"""
from __future__ import annotations

import itertools

import numpy as np

from umwsim.topology import Graph


def random_connected_graph(rng: np.random.Generator, max_edges: int = 12) -> Graph:
    """Random connected undirected graph with at most max_edges edges."""
    n = int(rng.integers(2, 8))
    edges: list[tuple[int, int]] = []
    seen = set()
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((u, v))
        seen.add((u, v))
    extra = int(rng.integers(0, max_edges - len(edges) + 1))
    candidates = [
        (u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in seen
    ]
    rng.shuffle(candidates)
    edges.extend(candidates[:extra])
    order = rng.permutation(len(edges))
    return Graph(n, tuple(edges[i] for i in order))


def random_rooted_digraph(rng: np.random.Generator, max_edges: int = 12) -> tuple[Graph, int]:
    """Random digraph in which every node is reachable from node 0."""
    n = int(rng.integers(2, 7))
    arcs: list[tuple[int, int]] = []
    seen = set()
    for v in range(1, n):
        u = int(rng.integers(0, v))
        arcs.append((u, v))
        seen.add((u, v))
    candidates = [
        (u, v) for u in range(n) for v in range(n) if u != v and (u, v) not in seen
    ]
    rng.shuffle(candidates)
    extra = int(rng.integers(0, max(max_edges - len(arcs), 0) + 1))
    arcs.extend(candidates[:extra])
    order = rng.permutation(len(arcs))
    return Graph(n, tuple(arcs[i] for i in order), directed=True), 0


def random_weights(rng: np.random.Generator, m: int) -> np.ndarray:
    """Small integer weights including zeros, to exercise tie-breaking."""
    return rng.integers(0, 11, size=m).astype(np.int64)


def is_matching(g: Graph, edge_ids) -> bool:
    nodes: set[int] = set()
    for e in edge_ids:
        u, v = g.edges[e]
        if u in nodes or v in nodes:
            return False
        nodes.update((u, v))
    return True


def all_matchings(g: Graph) -> list[frozenset[int]]:
    """Every matching of the graph, including non-maximal and empty ones."""
    out = []
    for r in range(g.m + 1):
        for combo in itertools.combinations(range(g.m), r):
            if is_matching(g, combo):
                out.append(frozenset(combo))
    return out


def brute_force_max_weight(g: Graph, w) -> float:
    return max(sum(w[e] for e in s) for s in all_matchings(g))


def bfs_depths(g: Graph, tree) -> dict[int, int]:
    """Recompute tree-edge depths by BFS from the root, independent of the
    depths stored on the tree."""
    by_tail: dict[int, list[tuple[int, int]]] = {}
    for te in tree.edges:
        by_tail.setdefault(te.parent, []).append((te.edge_id, te.child))
    depths: dict[int, int] = {}
    frontier = [(tree.root, 0)]
    while frontier:
        node, d = frontier.pop()
        for eid, child in by_tail.get(node, ()):
            depths[eid] = d
            frontier.append((child, d + 1))
    return depths
