"""Shared generators for randomized tests.

Everything is seeded; helpers return plain library objects so tests stay
independent of file layout unless they exercise the file formats.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from storytrails import ConstraintSet, Document, SparseCoherenceGraph, corpus_from_arrays
from storytrails.corpus import write_documents, write_matrix


class MatrixProvider:
    """Provider stub serving a fixed symmetric weight matrix."""

    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=np.float64)

    def __len__(self):
        return self.matrix.shape[0]

    def theta_row(self, u):
        return self.matrix[u]

    def theta(self, u, v):
        return float(self.matrix[u, v])


def make_random_corpus(rng: np.random.Generator, n: int, dim_hi: int = 8,
                       dim_lo: int = 2, clusters: int = 4, dated: bool = False):
    """Corpus with Gaussian embeddings and Dirichlet membership rows."""
    embeddings = rng.normal(size=(n, dim_hi))
    projections = rng.normal(size=(n, dim_lo))
    memberships = rng.dirichlet(np.ones(clusters), size=n)
    start = datetime(2020, 1, 1, tzinfo=timezone.utc)
    docs = []
    for i in range(n):
        date = start + timedelta(days=i) if dated else None
        docs.append(Document(id=f"d{i:04d}", date=date, title=f"doc {i}"))
    return corpus_from_arrays(docs, embeddings, projections, memberships)


def make_blob_corpus(rng: np.random.Generator, n: int, clusters: int = 6,
                     dim_hi: int = 16, spread: float = 0.6, separation: float = 4.0):
    """Corpus drawn from Gaussian topic blobs.

    Embeddings cluster around separated centers; memberships are soft
    assignments from a heavy-tailed kernel on center distances, so documents
    in different blobs keep a little shared topic mass.
    """
    centers = rng.normal(scale=separation, size=(clusters, dim_hi))
    labels = rng.integers(0, clusters, size=n)
    embeddings = centers[labels] + rng.normal(scale=spread, size=(n, dim_hi))
    distances = np.linalg.norm(embeddings[:, None, :] - centers[None, :, :], axis=2)
    scale = np.median(distances)
    affinity = 1.0 / (1.0 + (distances / scale) ** 2)
    memberships = affinity / affinity.sum(axis=1, keepdims=True)
    basis = rng.normal(size=(dim_hi, 2))
    projections = embeddings @ basis
    docs = [Document(id=f"d{i:04d}") for i in range(n)]
    return corpus_from_arrays(docs, embeddings, projections, memberships), labels


def graph_from_edges(n: int, edges, tau: float = 0.0, omega: float = 0.0) -> SparseCoherenceGraph:
    """Build a sparse graph directly from (u, v, w) triples."""
    adj: dict[int, list[tuple[int, float]]] = {u: [] for u in range(n)}
    for u, v, w in edges:
        adj[u].append((int(v), float(w)))
    targets, weights = [], []
    for u in range(n):
        pairs = sorted(adj[u])
        targets.append(np.array([v for v, _ in pairs], dtype=np.int64))
        weights.append(np.array([w for _, w in pairs], dtype=np.float64))
    return SparseCoherenceGraph(
        n=n, targets=targets, weights=weights, tau=tau, omega=omega,
        constraints=ConstraintSet(),
    )


def random_directed_graph(rng: np.random.Generator, n: int, p: float) -> SparseCoherenceGraph:
    """Random directed graph; edge weights uniform in (0, 1]."""
    edges = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                edges.append((u, v, 1.0 - rng.random()))
    return graph_from_edges(n, edges)


def random_connected_undirected_weights(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    """Symmetric weight matrix with -inf non-edges, resampled until the
    graph is connected. Weights uniform in (0, 1]."""
    while True:
        weights = np.full((n, n), -np.inf)
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < p:
                    w = 1.0 - rng.random()
                    weights[u, v] = weights[v, u] = w
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in range(n):
                if v not in seen and weights[u, v] > -np.inf:
                    seen.add(v)
                    stack.append(v)
        if len(seen) == n:
            return weights


def all_simple_path_bottlenecks(out_adj, s: int, t: int):
    """Exhaustive maximin oracle: DFS over simple paths, pruning extensions
    whose running minimum already cannot beat the best found. Returns the
    best bottleneck or None when t is unreachable.

    out_adj: list of (target, weight) lists.
    """
    best = None
    stack = [(s, np.inf, frozenset([s]))]
    while stack:
        u, running, visited = stack.pop()
        for v, w in out_adj[u]:
            if v in visited:
                continue
            cand = min(running, w)
            if best is not None and cand <= best:
                continue
            if v == t:
                best = cand
            else:
                stack.append((v, cand, visited | {v}))
    return best


def adjacency_of(graph: SparseCoherenceGraph):
    return [
        list(zip(graph.out_neighbors(u)[0].tolist(), graph.out_neighbors(u)[1].tolist()))
        for u in range(graph.n)
    ]


@pytest.fixture
def tiny_corpus_files(tmp_path):
    """Write a minimal 4-document corpus to disk; returns the four paths."""
    rng = np.random.default_rng(7)
    docs = [
        Document(id="a1", date=datetime(2020, 1, 1, tzinfo=timezone.utc)),
        Document(id="a2", date=datetime(2020, 1, 2, tzinfo=timezone.utc)),
        Document(id="a3", date=datetime(2020, 1, 3, tzinfo=timezone.utc)),
        Document(id="a4", date=datetime(2020, 1, 4, tzinfo=timezone.utc)),
    ]
    embeddings = rng.normal(size=(4, 8))
    projections = rng.normal(size=(4, 2))
    memberships = rng.dirichlet(np.ones(3), size=4)
    paths = {
        "docs": tmp_path / "documents.jsonl",
        "embeddings": tmp_path / "embeddings.ntm",
        "projections": tmp_path / "projections.ntm",
        "memberships": tmp_path / "memberships.ntm",
    }
    write_documents(paths["docs"], docs)
    write_matrix(paths["embeddings"], embeddings)
    write_matrix(paths["projections"], projections)
    write_matrix(paths["memberships"], memberships)
    return paths
