"""Storyline evaluation: minimum coherence, reliability, dynamic time
warping alignment between storylines, and the random / shortest-path
baselines.

Metrics are computed on dense base coherence, never on the sparsified
weights, so baseline sequences that hop across non-edges still score.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass

import numpy as np

from .coherence import CoherenceProvider
from .corpus import Corpus
from .graph import SparseCoherenceGraph
from .pathfind import NoPathError, SameEndpointsError, _lex_min_hop_path, geometric_mean


def storyline_metrics(sequence, provider: CoherenceProvider) -> tuple[float, float]:
    """(minimum coherence, reliability) of consecutive pairs along a
    document sequence, on dense base coherence."""
    nodes = [int(v) for v in sequence]
    if len(nodes) < 2:
        raise ValueError("storyline metrics need at least two documents")
    thetas = [provider.theta(u, v) for u, v in zip(nodes, nodes[1:])]
    return min(thetas), geometric_mean(thetas)


@dataclass(frozen=True)
class DtwAlignment:
    """Optimal warping between two point sequences.

    pairs runs from (0, 0) to (L1-1, L2-1) in steps of (1,0), (0,1) or
    (1,1); total_cost is the sum of matched-pair distances and is minimal
    over all such warpings.
    """

    pairs: tuple[tuple[int, int], ...]
    pair_distances: tuple[float, ...]
    total_cost: float

    def __len__(self) -> int:
        return len(self.pairs)


def _as_points(seq, name: str) -> np.ndarray:
    pts = np.asarray(seq, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty sequence of points")
    return pts


def dtw_align(a, b) -> DtwAlignment:
    """Classic dynamic time warping on Euclidean point distances, no
    window. Backtracking prefers the diagonal predecessor on cost ties,
    then the vertical one, so the alignment is deterministic."""
    pa = _as_points(a, "a")
    pb = _as_points(b, "b")
    if pa.shape[1] != pb.shape[1]:
        raise ValueError(f"point dimensionality differs: {pa.shape[1]} vs {pb.shape[1]}")
    la, lb = pa.shape[0], pb.shape[0]
    dist = np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=2)
    acc = np.empty((la, lb))
    acc[0, 0] = dist[0, 0]
    for j in range(1, lb):
        acc[0, j] = acc[0, j - 1] + dist[0, j]
    for i in range(1, la):
        acc[i, 0] = acc[i - 1, 0] + dist[i, 0]
        for j in range(1, lb):
            acc[i, j] = min(acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1]) + dist[i, j]
    pairs = [(la - 1, lb - 1)]
    i, j = la - 1, lb - 1
    while (i, j) != (0, 0):
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            best = min(acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1])
            if acc[i - 1, j - 1] == best:
                i, j = i - 1, j - 1
            elif acc[i - 1, j] == best:
                i = i - 1
            else:
                j = j - 1
        pairs.append((i, j))
    pairs.reverse()
    return DtwAlignment(
        pairs=tuple(pairs),
        pair_distances=tuple(float(dist[i, j]) for i, j in pairs),
        total_cost=float(acc[la - 1, lb - 1]),
    )


def ndtw_distance(alignment: DtwAlignment) -> float:
    """Accumulated warping cost normalized by the number of matched pairs."""
    return alignment.total_cost / len(alignment.pairs)


def dtw_similarity(a, b, alignment: DtwAlignment) -> float:
    """Mean cosine similarity over the matched pairs, on the same points
    that drove the alignment."""
    pa = _as_points(a, "a")
    pb = _as_points(b, "b")
    sims = []
    for i, j in alignment.pairs:
        x, y = pa[i], pb[j]
        nx, ny = np.linalg.norm(x), np.linalg.norm(y)
        if nx == 0.0 or ny == 0.0:
            raise ValueError(f"zero vector among matched points at pair ({i}, {j})")
        sims.append(float(np.dot(x / nx, y / ny)))
    return float(np.mean(sims))


def random_baseline(
    corpus: Corpus,
    s: int,
    t: int,
    length: int,
    seed: int,
    time_directed: bool = False,
) -> tuple[int, ...]:
    """Baseline sequence: s, then length-2 interior documents sampled
    uniformly without replacement, then t.

    Interiors keep their sampled order, or are date-sorted when
    time_directed; a date-sorted sequence that cannot start at s and end at
    t is an error. Deterministic under a fixed seed.
    """
    n = len(corpus)
    if length < 2:
        raise ValueError(f"baseline length must be >= 2, got {length}")
    if s == t:
        raise SameEndpointsError(f"source and target are both node {s}")
    eligible = [i for i in range(n) if i != s and i != t]
    if length - 2 > len(eligible):
        raise ValueError(
            f"insufficient eligible nodes: need {length - 2} interiors, have {len(eligible)}"
        )
    interior = random.Random(seed).sample(eligible, length - 2)
    if time_directed:
        for idx in (s, *interior, t):
            doc = corpus.documents[idx]
            if doc.date is None:
                raise ValueError(f"time-directed baseline needs dates; {doc.id!r} has none")
        interior.sort(key=lambda idx: (corpus.documents[idx].date, idx))
        date_s = corpus.documents[s].date
        date_t = corpus.documents[t].date
        lo = corpus.documents[interior[0]].date if interior else date_s
        hi = corpus.documents[interior[-1]].date if interior else date_t
        if lo < date_s or hi > date_t or date_t < date_s:
            raise ValueError(
                "date order does not permit a chronological sequence "
                f"from {corpus.documents[s].id!r} to {corpus.documents[t].id!r}"
            )
    return (s, *interior, t)


def shortest_simple_path(graph: SparseCoherenceGraph, s: int, t: int) -> tuple[int, ...]:
    """Minimum-hop directed s->t path; hop ties resolve to the
    lexicographically smallest node sequence."""
    if s == t:
        raise SameEndpointsError(f"source and target are both node {s}")
    blocked = np.zeros(graph.n, dtype=bool)
    try:
        return tuple(_lex_min_hop_path(graph, s, t, blocked))
    except NoPathError:
        raise NoPathError(f"no path from {s} to {t}") from None


CSV_COLUMNS = (
    "method",
    "storyline_index",
    "source",
    "target",
    "length",
    "min_coherence",
    "reliability",
    "dtw_similarity",
    "ndtw_distance",
    "dtw_space",
)


@dataclass(frozen=True)
class EvalRow:
    """One evaluated storyline; DTW fields are present only when a reference
    storyline was supplied."""

    method: str
    storyline_index: int
    source: str
    target: str
    length: int
    min_coherence: float
    reliability: float
    dtw_similarity: float | None = None
    ndtw_distance: float | None = None
    dtw_space: str | None = None


@dataclass(frozen=True)
class EvaluationReport:
    rows: tuple[EvalRow, ...]
    config: dict | None = None
    graph_fingerprint: str | None = None

    def to_json_obj(self) -> dict:
        return {
            "config": self.config,
            "graph_fingerprint": self.graph_fingerprint,
            "rows": [
                {col: getattr(row, col) for col in CSV_COLUMNS} for row in self.rows
            ],
        }

    def to_csv_text(self) -> str:
        """CSV with two leading comment lines carrying config provenance,
        then a fixed header and one row per storyline."""
        buf = io.StringIO()
        buf.write(f"# config {json.dumps(self.config, sort_keys=True)}\n")
        buf.write(f"# graph_fingerprint {self.graph_fingerprint}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow(
                ["" if (v := getattr(row, col)) is None else v for col in CSV_COLUMNS]
            )
        return buf.getvalue()
