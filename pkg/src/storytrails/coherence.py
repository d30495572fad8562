"""Pairwise document coherence: angular similarity, topic similarity, and
their geometric mean, plus a provider that serves values either from a
materialized n-by-n matrix or lazily on demand.

Coherence between two documents is sqrt(S * T), where S maps the angle
between their high-dimensional embeddings into [0, 1] and T is one minus the
Jensen-Shannon divergence (base-2 logs, so T stays in [0, 1]) between their
cluster membership distributions.
"""

from __future__ import annotations

import numpy as np

from .corpus import SIMPLEX_TOL, Corpus

# Node count above which the full pairwise matrix is never materialized.
DEFAULT_MATERIALIZATION_THRESHOLD = 8192


def _check_vector(z: np.ndarray, name: str) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector")
    return z


def _angle_between_units(a: np.ndarray, b: np.ndarray) -> float:
    # 2*atan2(|a-b|, |a+b|) equals arccos(a.b) for unit vectors but stays
    # well-conditioned at both ends, where arccos amplifies float drift.
    return 2.0 * np.arctan2(np.linalg.norm(a - b), np.linalg.norm(a + b))


def angular_similarity(z_u, z_v) -> float:
    """Angle between two non-zero vectors mapped to [0, 1]: 1 for parallel,
    0.5 for orthogonal, 0 for opposite."""
    z_u = _check_vector(z_u, "z_u")
    z_v = _check_vector(z_v, "z_v")
    if z_u.shape != z_v.shape:
        raise ValueError(f"dimension mismatch: {z_u.shape} vs {z_v.shape}")
    nu = np.linalg.norm(z_u)
    nv = np.linalg.norm(z_v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("angular similarity is undefined for the zero vector")
    return float(1.0 - _angle_between_units(z_u / nu, z_v / nv) / np.pi)


def _check_simplex(h: np.ndarray, name: str) -> np.ndarray:
    h = _check_vector(h, name)
    if (h < 0).any():
        raise ValueError(f"{name} has negative entries")
    total = h.sum()
    if abs(total - 1.0) > SIMPLEX_TOL:
        raise ValueError(f"{name} sums to {total!r}, off the probability simplex")
    return h


def _jsd_base2(p: np.ndarray, q: np.ndarray) -> float:
    m = 0.5 * (p + q)
    with np.errstate(divide="ignore", invalid="ignore"):
        kl_p = np.where(p > 0, p * np.log2(p / m), 0.0).sum()
        kl_q = np.where(q > 0, q * np.log2(q / m), 0.0).sum()
    return float(0.5 * kl_p + 0.5 * kl_q)


def topic_similarity(h_u, h_v) -> float:
    """One minus the base-2 Jensen-Shannon divergence between two membership
    distributions; 1 for identical, 0 for disjoint support."""
    h_u = _check_simplex(h_u, "h_u")
    h_v = _check_simplex(h_v, "h_v")
    if h_u.shape != h_v.shape:
        raise ValueError(f"dimension mismatch: {h_u.shape} vs {h_v.shape}")
    return float(np.clip(1.0 - _jsd_base2(h_u, h_v), 0.0, 1.0))


def base_coherence(corpus: Corpus, u: int, v: int) -> float:
    """Geometric mean of angular and topic similarity for documents u, v.

    Computed as sqrt(S*T) rather than in log domain so a zero factor yields
    an exact zero. Evaluation order is canonicalized on (min, max) index so
    the value is exactly symmetric.
    """
    a, b = (u, v) if u <= v else (v, u)
    s = angular_similarity(corpus.embeddings[a], corpus.embeddings[b])
    t = topic_similarity(corpus.memberships[a], corpus.memberships[b])
    return float(np.sqrt(s * t))


class CoherenceProvider:
    """Serves pairwise coherence for one corpus.

    In materialized mode the full symmetric matrix is precomputed; in lazy
    mode values are computed on demand. Corpora larger than
    `materialization_threshold` are always served lazily. Both modes are
    read-only after construction and safe for concurrent queries.
    """

    def __init__(
        self,
        corpus: Corpus,
        mode: str = "auto",
        materialization_threshold: int = DEFAULT_MATERIALIZATION_THRESHOLD,
    ):
        if mode not in ("auto", "materialized", "lazy"):
            raise ValueError(f"unknown provider mode {mode!r}")
        self.corpus = corpus
        self.materialization_threshold = materialization_threshold
        n = len(corpus)
        norms = np.linalg.norm(corpus.embeddings, axis=1, keepdims=True)
        self._unit = corpus.embeddings / norms
        self._memberships = corpus.memberships
        materialize = mode == "materialized" or (mode == "auto" and n > 0)
        if n > materialization_threshold:
            materialize = False
        self._matrix: np.ndarray | None = None
        if materialize:
            self._matrix = self._materialize()
        self.mode = "materialized" if self._matrix is not None else "lazy"

    def __len__(self) -> int:
        return len(self.corpus)

    def _row_kernel(self, u: int) -> np.ndarray:
        """Coherence of document u against every document, with theta(u,u)=1."""
        diff = np.linalg.norm(self._unit - self._unit[u], axis=1)
        summ = np.linalg.norm(self._unit + self._unit[u], axis=1)
        ang = 1.0 - 2.0 * np.arctan2(diff, summ) / np.pi
        h = self._memberships
        hu = h[u]
        m = 0.5 * (h + hu)
        with np.errstate(divide="ignore", invalid="ignore"):
            kl_u = np.where(hu > 0, hu * np.log2(hu / m), 0.0).sum(axis=1)
            kl_v = np.where(h > 0, h * np.log2(h / m), 0.0).sum(axis=1)
        topic = np.clip(1.0 - 0.5 * (kl_u + kl_v), 0.0, 1.0)
        row = np.sqrt(np.clip(ang, 0.0, 1.0) * topic)
        row[u] = 1.0
        return row

    def _materialize(self) -> np.ndarray:
        n = len(self.corpus)
        matrix = np.empty((n, n))
        for u in range(n):
            matrix[u] = self._row_kernel(u)
        # Mirror the upper triangle so symmetry holds bit-exactly.
        iu = np.triu_indices(n, k=1)
        matrix[(iu[1], iu[0])] = matrix[iu]
        np.fill_diagonal(matrix, 1.0)
        return matrix

    def theta(self, u: int, v: int) -> float:
        """Base coherence of the pair (u, v); exactly symmetric."""
        if u == v:
            return 1.0
        a, b = (u, v) if u < v else (v, u)
        if self._matrix is not None:
            return float(self._matrix[a, b])
        ang = 1.0 - _angle_between_units(self._unit[a], self._unit[b]) / np.pi
        topic = np.clip(1.0 - _jsd_base2(self._memberships[a], self._memberships[b]), 0.0, 1.0)
        return float(np.sqrt(np.clip(ang, 0.0, 1.0) * topic))

    def theta_row(self, u: int) -> np.ndarray:
        """Coherence of u against all documents (read-only view or fresh array)."""
        if self._matrix is not None:
            return self._matrix[u]
        return self._row_kernel(u)
