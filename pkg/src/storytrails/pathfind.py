"""Maximum-capacity path extraction.

A storyline between two documents is a simple path maximizing the minimum
edge weight. The search is Dijkstra with a maximin objective: a node's
tentative score is the larger of the bottlenecks achievable so far, where
extending a path through an edge caps its bottleneck at that edge's weight.
Up to k interior-disjoint storylines are extracted by removing the interior
nodes of previously found paths.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .graph import SparseCoherenceGraph


class NoPathError(Exception):
    """No path exists between the requested endpoints."""


class SameEndpointsError(ValueError):
    """Source and target must differ."""


def geometric_mean(values) -> float:
    values = [float(v) for v in values]
    if not values:
        raise ValueError("geometric mean of an empty sequence")
    if min(values) == 0.0:
        return 0.0
    return math.prod(values) ** (1.0 / len(values))


@dataclass(frozen=True)
class Storyline:
    """Simple path of document indices with its per-edge weights.

    bottleneck is the minimum edge weight; reliability is the geometric mean
    of the edge weights (always >= bottleneck).
    """

    nodes: tuple[int, ...]
    edge_weights: tuple[float, ...]
    bottleneck: float
    reliability: float

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def interior(self) -> tuple[int, ...]:
        return self.nodes[1:-1]


def storyline_from_nodes(graph: SparseCoherenceGraph, nodes) -> Storyline:
    """Build a storyline from a node sequence, reading edge weights from the
    graph; rejects sequences that are not simple paths of graph edges."""
    nodes = tuple(int(v) for v in nodes)
    if len(nodes) < 2:
        raise ValueError("a storyline needs at least two documents")
    if len(set(nodes)) != len(nodes):
        raise ValueError("storyline revisits a document")
    weights = []
    for u, v in zip(nodes, nodes[1:]):
        w = graph.edge_weight(u, v)
        if w is None:
            raise ValueError(f"storyline uses missing edge ({u}, {v})")
        weights.append(w)
    return Storyline(
        nodes=nodes,
        edge_weights=tuple(weights),
        bottleneck=min(weights),
        reliability=geometric_mean(weights),
    )


@dataclass(frozen=True)
class NarrativeTrail:
    """Interior-disjoint storylines sharing one source/target pair.

    exhausted is set when the graph ran out of disjoint routes before the
    requested count was reached.
    """

    source: int
    target: int
    storylines: tuple[Storyline, ...]
    exhausted: bool


def _check_endpoints(graph: SparseCoherenceGraph, s: int, t: int, excluded) -> None:
    if s == t:
        raise SameEndpointsError(f"source and target are both node {s}")
    for name, node in (("source", s), ("target", t)):
        if not 0 <= node < graph.n:
            raise ValueError(f"{name} node {node} out of range for n={graph.n}")
        if node in excluded:
            raise ValueError(f"{name} node {node} is in the excluded set")


def _max_capacity(graph: SparseCoherenceGraph, s: int, t: int, blocked: np.ndarray) -> float:
    """Best achievable bottleneck from s to t, or -inf if unreachable.

    Classic Dijkstra except the tentative score of a node is
    min(score of predecessor, edge weight) and the best score is the max.
    """
    cap = np.full(graph.n, -np.inf)
    cap[s] = np.inf
    finalized = np.zeros(graph.n, dtype=bool)
    heap: list[tuple[float, int]] = [(-np.inf, s)]
    while heap:
        neg, u = heapq.heappop(heap)
        if finalized[u]:
            continue
        finalized[u] = True
        if u == t:
            break
        for v, w in zip(*graph.out_neighbors(u)):
            if blocked[v]:
                continue
            cand = min(cap[u], w)
            if finalized[v]:
                # once finalized a label can never improve
                assert cand <= cap[v]
                continue
            if cand > cap[v]:
                cap[v] = cand
                heapq.heappush(heap, (-cand, int(v)))
    return float(cap[t])


def _lex_min_hop_path(
    graph: SparseCoherenceGraph,
    s: int,
    t: int,
    blocked: np.ndarray,
    weight_floor: float | None = None,
) -> list[int]:
    """Minimum-hop s->t path, lexicographically smallest node sequence among
    ties, optionally restricted to edges of weight >= weight_floor.

    Hop distances to t are computed by a reverse sweep; the path then walks
    forward always taking the smallest-index neighbor that stays on a
    shortest route, which yields the lexicographic minimum.
    """
    n = graph.n
    reverse: list[list[int]] = [[] for _ in range(n)]
    for u in range(n):
        if blocked[u]:
            continue
        targets, weights = graph.out_neighbors(u)
        for v, w in zip(targets, weights):
            if blocked[v]:
                continue
            if weight_floor is not None and w < weight_floor:
                continue
            reverse[v].append(u)
    dist = np.full(n, -1, dtype=np.int64)
    dist[t] = 0
    frontier = [t]
    while frontier and dist[s] < 0:
        nxt = []
        for v in frontier:
            for u in reverse[v]:
                if dist[u] < 0:
                    dist[u] = dist[v] + 1
                    nxt.append(u)
        frontier = nxt
    if dist[s] < 0:
        raise NoPathError(f"no path from {s} to {t}")
    path = [s]
    cur = s
    while cur != t:
        targets, weights = graph.out_neighbors(cur)
        step = -1
        for v, w in zip(targets, weights):
            if blocked[v] or (weight_floor is not None and w < weight_floor):
                continue
            if dist[v] == dist[cur] - 1:
                step = int(v)
                break  # targets are sorted, first hit is the smallest index
        assert step >= 0
        path.append(step)
        cur = step
    return path


def widest_path(
    graph: SparseCoherenceGraph, s: int, t: int, excluded=frozenset()
) -> Storyline:
    """Simple s->t path maximizing the minimum edge weight, avoiding the
    excluded nodes. Capacity ties prefer fewer hops, then the
    lexicographically smallest node sequence, so results are deterministic.
    """
    excluded = frozenset(int(x) for x in excluded)
    _check_endpoints(graph, s, t, excluded)
    blocked = np.zeros(graph.n, dtype=bool)
    if excluded:
        blocked[list(excluded)] = True
    capacity = _max_capacity(graph, s, t, blocked)
    if capacity == -np.inf:
        raise NoPathError(f"no path from {s} to {t}")
    # Every edge of weight >= capacity keeps the bottleneck optimal, so the
    # tie-break reduces to a shortest-hop search on that subgraph.
    nodes = _lex_min_hop_path(graph, s, t, blocked, weight_floor=capacity)
    return storyline_from_nodes(graph, nodes)


def extract_trail(graph: SparseCoherenceGraph, s: int, t: int, k: int) -> NarrativeTrail:
    """Extract up to k storylines with pairwise-disjoint interiors.

    After each find, its interior nodes are excluded from later searches.
    Running out of routes before k sets the exhausted flag; finding none at
    all raises NoPathError.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    storylines: list[Storyline] = []
    excluded: set[int] = set()
    exhausted = False
    for _ in range(k):
        try:
            found = widest_path(graph, s, t, excluded)
        except NoPathError:
            if not storylines:
                raise
            exhausted = True
            break
        storylines.append(found)
        excluded.update(found.interior)
    return NarrativeTrail(
        source=s, target=t, storylines=tuple(storylines), exhausted=exhausted
    )


def reduce_redundancy(
    storyline: Storyline, graph: SparseCoherenceGraph, delta: float
) -> Storyline:
    """Drop interior documents whose neighbors connect directly almost as
    well as through them.

    One forward pass over consecutive triplets (A, B, C): B is removed when
    the graph has an edge (A, C) whose weight is within delta of the
    geometric mean of w(A,B) and w(B,C). After a removal the same position
    is re-examined against the next document. A removal is also required to
    keep the bottleneck within delta of the incoming storyline's bottleneck,
    so one pass never degrades the weakest link by more than delta.
    Endpoints are never removed.
    """
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    nodes = list(storyline.nodes)
    # validates the storyline against this graph up front
    storyline_from_nodes(graph, nodes)
    floor = storyline.bottleneck - delta
    i = 0
    while i + 2 < len(nodes):
        a, b, c = nodes[i], nodes[i + 1], nodes[i + 2]
        w_ab = graph.edge_weight(a, b)
        w_bc = graph.edge_weight(b, c)
        shortcut = graph.edge_weight(a, c)
        threshold = math.sqrt(w_ab * w_bc) - delta
        if shortcut is not None and shortcut >= threshold and shortcut >= floor:
            del nodes[i + 1]
        else:
            i += 1
    return storyline_from_nodes(graph, nodes)
