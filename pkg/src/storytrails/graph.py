"""Sparse coherence graph construction.

The complete pairwise-coherence graph is never materialized as edges.
Instead a maximum spanning tree is grown with a dense Prim sweep (O(n^2)
time, O(n) auxiliary space over the implicit complete graph); its minimum
edge weight is the critical connectivity level. Directed edges then survive
sparsification iff their coherence clears tau times that bottleneck and all
active task constraints admit them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .coherence import CoherenceProvider
from .corpus import Corpus

CENTRALITY_MODES = ("off", "source", "target")


def _normalize_centrality_mode(mode: str) -> str:
    mode = {"scale-by-source": "source", "scale-by-target": "target"}.get(mode, mode)
    if mode not in CENTRALITY_MODES:
        raise ValueError(f"unknown centrality mode {mode!r}")
    return mode


@dataclass(frozen=True)
class MaxSpanningTree:
    """Maximum spanning tree of the complete coherence graph.

    Edges are undirected (u, v, weight) with u < v, listed in the order Prim
    added them. bottleneck_weight is the minimum edge weight in the tree.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]
    bottleneck_weight: float

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj

    def path_bottleneck(self, s: int, t: int) -> float:
        """Minimum edge weight on the unique s-t path in the tree."""
        adj = self.adjacency()
        parent = {s: (-1, 0.0)}
        stack = [s]
        while stack:
            u = stack.pop()
            if u == t:
                break
            for v, w in adj[u]:
                if v not in parent:
                    parent[v] = (u, w)
                    stack.append(v)
        if t not in parent:
            raise ValueError("tree does not connect the endpoints")
        bottleneck = np.inf
        node = t
        while node != s:
            prev, w = parent[node]
            bottleneck = min(bottleneck, w)
            node = prev
        return float(bottleneck)


def _prim_max_spanning_tree(n: int, row_fn) -> MaxSpanningTree:
    """Dense Prim over an implicit complete graph given by row_fn(u) -> weights.

    Ties select the smallest node index (argmax returns the first maximum)
    and, for equal-weight connections, the smaller parent index, so builds
    are deterministic. A -inf selection means the weights do not connect the
    graph.
    """
    if n < 2:
        raise ValueError(f"spanning tree needs at least 2 nodes, got {n}")
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    key = np.asarray(row_fn(0), dtype=np.float64).copy()
    parent = np.zeros(n, dtype=np.int64)
    key[0] = -np.inf
    edges: list[tuple[int, int, float]] = []
    for _ in range(n - 1):
        v = int(np.argmax(key))
        w = float(key[v])
        if w == -np.inf:
            raise ValueError("weights do not form a connected graph")
        p = int(parent[v])
        edges.append((min(p, v), max(p, v), w))
        in_tree[v] = True
        key[v] = -np.inf
        row = np.asarray(row_fn(v), dtype=np.float64)
        cand = ~in_tree
        better = cand & (row > key)
        ties = cand & (row == key) & (v < parent)
        key[better] = row[better]
        parent[better | ties] = v
    bottleneck = float(min(w for _, _, w in edges))
    return MaxSpanningTree(n=n, edges=tuple(edges), bottleneck_weight=bottleneck)


def build_max_spanning_tree(provider: CoherenceProvider) -> MaxSpanningTree:
    """Maximum spanning tree of the complete pairwise-coherence graph."""
    return _prim_max_spanning_tree(len(provider), provider.theta_row)


def max_spanning_tree_of_matrix(weights: np.ndarray) -> MaxSpanningTree:
    """Maximum spanning tree of an explicit symmetric weight matrix.

    Absent edges may be encoded as -inf; a disconnected matrix raises.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
        raise ValueError("weight matrix must be square")
    return _prim_max_spanning_tree(weights.shape[0], lambda u: weights[u])


@dataclass(frozen=True)
class ConstraintSet:
    """Task constraints applied during sparsification.

    edge_mask, when present, is the set of allowed directed (u, v) index
    pairs; time_directed admits an edge only when the target document is
    strictly later than the source.
    """

    time_directed: bool = False
    edge_mask: frozenset[tuple[int, int]] | None = None
    centrality_mode: str = "off"

    def __post_init__(self):
        object.__setattr__(
            self, "centrality_mode", _normalize_centrality_mode(self.centrality_mode)
        )


def edge_mask_from_ids(corpus: Corpus, id_pairs) -> frozenset[tuple[int, int]]:
    """Translate (source id, target id) pairs into an index mask, rejecting
    ids that are not in the corpus."""
    mask = set()
    for src, dst in id_pairs:
        try:
            mask.add((corpus.index_of(src), corpus.index_of(dst)))
        except KeyError as exc:
            raise ValueError(f"edge mask references unknown id: {exc}") from None
    return frozenset(mask)


class SparseCoherenceGraph:
    """Directed weighted graph of above-threshold coherence edges.

    Adjacency is stored per source node as sorted target/weight arrays, so
    neighbor queries are O(out-degree) and edge lookups are a binary search.
    Instances are immutable after construction.
    """

    def __init__(
        self,
        n: int,
        targets: list[np.ndarray],
        weights: list[np.ndarray],
        tau: float,
        omega: float,
        constraints: ConstraintSet,
    ):
        if len(targets) != n or len(weights) != n:
            raise ValueError("adjacency lists must cover every node")
        self.n = n
        self.tau = float(tau)
        self.omega = float(omega)
        self.constraints = constraints
        self._targets = [np.asarray(t, dtype=np.int64) for t in targets]
        self._weights = [np.asarray(w, dtype=np.float64) for w in weights]
        for t, w in zip(self._targets, self._weights):
            t.setflags(write=False)
            w.setflags(write=False)
        self.edge_count = int(sum(len(t) for t in self._targets))

    def out_neighbors(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        return self._targets[u], self._weights[u]

    def edge_weight(self, u: int, v: int) -> float | None:
        targets = self._targets[u]
        pos = int(np.searchsorted(targets, v))
        if pos < len(targets) and targets[pos] == v:
            return float(self._weights[u][pos])
        return None

    def has_edge(self, u: int, v: int) -> bool:
        return self.edge_weight(u, v) is not None

    def edges(self):
        """Yield (u, v, w) with u ascending, then v ascending."""
        for u in range(self.n):
            for v, w in zip(self._targets[u], self._weights[u]):
                yield int(u), int(v), float(w)

    def reweighted(self, new_weights: list[np.ndarray], constraints=None):
        """Copy with per-edge weights replaced; zero-weight edges are dropped."""
        targets_out = []
        weights_out = []
        for t, w in zip(self._targets, new_weights):
            keep = w > 0
            targets_out.append(t[keep])
            weights_out.append(np.asarray(w, dtype=np.float64)[keep])
        return SparseCoherenceGraph(
            n=self.n,
            targets=targets_out,
            weights=weights_out,
            tau=self.tau,
            omega=self.omega,
            constraints=constraints if constraints is not None else self.constraints,
        )


def _dates_as_microseconds(corpus: Corpus) -> np.ndarray:
    micros = np.empty(len(corpus), dtype=np.int64)
    for i, doc in enumerate(corpus.documents):
        if doc.date is None:
            raise ValueError(
                f"time-directed constraint requires dates; document {doc.id!r} has none"
            )
        micros[i] = int(doc.date.timestamp() * 1_000_000)
    return micros


def sparsify(
    provider: CoherenceProvider,
    tree: MaxSpanningTree,
    tau: float,
    constraints: ConstraintSet,
    corpus: Corpus,
) -> SparseCoherenceGraph:
    """Build the directed sparse graph: edge u->v iff coherence(u,v) clears
    tau times the tree bottleneck, is positive, and every active constraint
    admits (u, v). Weights are the coherence values, then rescaled by
    closeness centrality when the constraint set asks for it.
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    n = len(provider)
    threshold = tau * tree.bottleneck_weight
    dates = _dates_as_microseconds(corpus) if constraints.time_directed else None
    mask_by_source: dict[int, np.ndarray] | None = None
    if constraints.edge_mask is not None:
        by_source: dict[int, list[int]] = {}
        for u, v in constraints.edge_mask:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge mask pair ({u}, {v}) out of range for n={n}")
            by_source.setdefault(u, []).append(v)
        mask_by_source = {u: np.array(sorted(vs), dtype=np.int64) for u, vs in by_source.items()}

    targets: list[np.ndarray] = []
    weights: list[np.ndarray] = []
    for u in range(n):
        row = provider.theta_row(u)
        keep = (row >= threshold) & (row > 0)
        keep[u] = False
        if dates is not None:
            keep &= dates > dates[u]
        if mask_by_source is not None:
            allowed = np.zeros(n, dtype=bool)
            allowed[mask_by_source.get(u, np.empty(0, dtype=np.int64))] = True
            keep &= allowed
        idx = np.nonzero(keep)[0]
        targets.append(idx.astype(np.int64))
        weights.append(row[idx].astype(np.float64))

    graph = SparseCoherenceGraph(
        n=n,
        targets=targets,
        weights=weights,
        tau=tau,
        omega=tree.bottleneck_weight,
        constraints=constraints,
    )
    if constraints.centrality_mode != "off":
        graph = centrality_weights(graph, constraints.centrality_mode)
    return graph


def closeness_centralities(graph: SparseCoherenceGraph) -> np.ndarray:
    """Closeness per node over outgoing hop distances, normalized by the
    reachable fraction (reachable/(n-1) * reachable/sum-of-distances); a node
    reaching nothing scores 0."""
    n = graph.n
    scores = np.zeros(n)
    if n <= 1:
        return scores
    for s in range(n):
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        frontier = [s]
        depth = 0
        reached = 0
        total = 0
        while frontier:
            depth += 1
            nxt = []
            for u in frontier:
                for v in graph.out_neighbors(u)[0]:
                    if dist[v] < 0:
                        dist[v] = depth
                        nxt.append(int(v))
                        reached += 1
                        total += depth
            frontier = nxt
        if reached:
            scores[s] = (reached / (n - 1)) * (reached / total)
    return scores


def centrality_weights(graph: SparseCoherenceGraph, mode: str) -> SparseCoherenceGraph:
    """Rescale each edge weight by the closeness score of its source or
    target node. Not idempotent: applying twice scales twice. Edges whose
    weight becomes zero are dropped."""
    mode = _normalize_centrality_mode(mode)
    if mode == "off":
        raise ValueError("centrality mode 'off' is not a rescaling")
    scores = closeness_centralities(graph)
    new_weights = []
    for u in range(graph.n):
        targets, weights = graph.out_neighbors(u)
        factor = scores[u] if mode == "source" else scores[targets]
        new_weights.append(weights * factor)
    return graph.reweighted(new_weights, replace(graph.constraints, centrality_mode=mode))


@dataclass(frozen=True)
class ComponentReport:
    count: int
    sizes: tuple[int, ...]


def connectivity_report(graph: SparseCoherenceGraph) -> ComponentReport:
    """Weakly connected components of the sparse graph (direction ignored)."""
    n = graph.n
    undirected: list[set[int]] = [set() for _ in range(n)]
    for u, v, _ in graph.edges():
        undirected[u].add(v)
        undirected[v].add(u)
    seen = np.zeros(n, dtype=bool)
    sizes = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        size = 0
        while stack:
            node = stack.pop()
            size += 1
            for nb in undirected[node]:
                if not seen[nb]:
                    seen[nb] = True
                    stack.append(nb)
        sizes.append(size)
    return ComponentReport(count=len(sizes), sizes=tuple(sorted(sizes, reverse=True)))


def _flags_token(constraints: ConstraintSet) -> str:
    tokens = []
    if constraints.time_directed:
        tokens.append("time")
    if constraints.edge_mask is not None:
        tokens.append("mask")
    if constraints.centrality_mode != "off":
        tokens.append(f"cc={constraints.centrality_mode}")
    return ",".join(tokens) if tokens else "none"


def _constraints_from_flags(token: str) -> ConstraintSet:
    time_directed = False
    centrality = "off"
    masked = False
    if token != "none":
        for part in token.split(","):
            if part == "time":
                time_directed = True
            elif part == "mask":
                masked = True
            elif part.startswith("cc="):
                centrality = part[3:]
            else:
                raise ValueError(f"unknown graph flag {part!r}")
    # Mask membership itself is not serialized; the flag records provenance.
    mask = frozenset() if masked else None
    return ConstraintSet(time_directed=time_directed, edge_mask=mask, centrality_mode=centrality)


def save_graph(path: str | Path, graph: SparseCoherenceGraph) -> None:
    """Write the text cache: a header line, then one tab-separated edge per
    line with weights printed to 17 significant digits (exact round-trip)."""
    lines = [
        f"ntgraph 1 {graph.n} {graph.tau:.17g} {graph.omega:.17g} "
        f"{_flags_token(graph.constraints)}"
    ]
    for u, v, w in graph.edges():
        lines.append(f"{u}\t{v}\t{w:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def load_graph(path: str | Path) -> SparseCoherenceGraph:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 6 or header[0] != "ntgraph" or header[1] != "1":
            raise ValueError(f"{path}: not an ntgraph version-1 cache")
        n = int(header[2])
        tau = float(header[3])
        omega = float(header[4])
        constraints = _constraints_from_flags(header[5])
        targets: list[list[int]] = [[] for _ in range(n)]
        weights: list[list[float]] = [[] for _ in range(n)]
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: malformed edge line")
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"{path}:{lineno}: edge endpoint out of range")
            targets[u].append(v)
            weights[u].append(w)
    return SparseCoherenceGraph(
        n=n,
        targets=[np.array(t, dtype=np.int64) for t in targets],
        weights=[np.array(w, dtype=np.float64) for w in weights],
        tau=tau,
        omega=omega,
        constraints=constraints,
    )
