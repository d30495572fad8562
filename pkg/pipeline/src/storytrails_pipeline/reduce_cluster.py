"""Dimensionality reduction and soft clustering.

Embeddings are projected with PCA (deterministic full SVD) and clustered
in the projected space with HDBSCAN. Per-document membership distributions
come from a heavy-tailed kernel on distances to cluster centroids, scaled
by HDBSCAN's own membership confidence: well-clustered points concentrate
mass on their cluster but keep a little on neighbors, and noise points keep
mass below one (the core package turns the deficit into an explicit
outlier component on ingest).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.cluster import HDBSCAN
from sklearn.decomposition import PCA

from .config import PipelineConfig


@dataclass(frozen=True)
class ProjectionResult:
    projection: np.ndarray
    display: np.ndarray
    memberships: np.ndarray
    cluster_count: int
    noise_fraction: float
    warnings: tuple[str, ...]


def _soft_memberships(points: np.ndarray, labels: np.ndarray, probabilities: np.ndarray):
    cluster_ids = sorted(int(c) for c in set(labels.tolist()) if c >= 0)
    centroids = np.stack([points[labels == c].mean(axis=0) for c in cluster_ids])
    own = np.linalg.norm(points[labels >= 0] - centroids[[cluster_ids.index(int(c)) for c in labels[labels >= 0]]], axis=1)
    scale = float(own.mean()) or 1.0
    distances = np.linalg.norm(points[:, None, :] - centroids[None, :, :], axis=2)
    affinity = 1.0 / (1.0 + (distances / scale) ** 2)
    affinity /= affinity.sum(axis=1, keepdims=True)
    return np.clip(affinity * probabilities[:, None], 0.0, None)


def project_and_cluster(embeddings: np.ndarray, config: PipelineConfig) -> ProjectionResult:
    """(m-dim projection, 2-dim display projection, membership matrix).

    Deterministic under a fixed seed. Degenerate clusterings (a single
    cluster, everything noise, or a corpus too small to cluster) come back
    as warnings with uniform single-cluster memberships, never as errors.
    """
    embeddings = np.asarray(embeddings, dtype=np.float64)
    n, dim = embeddings.shape
    if config.projection_dims >= dim:
        raise ValueError(
            f"projection_dims must be below the embedding dimension "
            f"({config.projection_dims} >= {dim})"
        )
    warnings: list[str] = []
    m = min(config.projection_dims, n)
    if m < config.projection_dims:
        warnings.append(f"projection reduced to {m} dims ({n} documents)")
    pca = PCA(n_components=m, svd_solver="full", random_state=config.seed)
    projection = pca.fit_transform(embeddings)
    display = projection[:, : config.display_dims]

    labels = None
    probabilities = None
    if n >= 2 * config.min_cluster_size:
        clusterer = HDBSCAN(min_cluster_size=config.min_cluster_size)
        clusterer.fit(projection)
        labels = np.asarray(clusterer.labels_)
        probabilities = np.asarray(clusterer.probabilities_, dtype=np.float64)
    else:
        warnings.append(
            f"corpus of {n} documents cannot form two clusters of "
            f"min_cluster_size={config.min_cluster_size}; skipping clustering"
        )

    if labels is None or not (labels >= 0).any():
        if labels is not None:
            warnings.append("clustering found only noise")
        memberships = np.ones((n, 1))
        return ProjectionResult(
            projection=projection,
            display=display,
            memberships=memberships,
            cluster_count=0,
            noise_fraction=1.0 if labels is not None else 0.0,
            warnings=tuple(warnings),
        )

    cluster_count = int(labels.max()) + 1
    if cluster_count == 1:
        warnings.append("clustering found a single cluster")
    noise_fraction = float((labels < 0).mean())
    memberships = _soft_memberships(projection, labels, probabilities)
    return ProjectionResult(
        projection=projection,
        display=display,
        memberships=memberships,
        cluster_count=cluster_count,
        noise_fraction=noise_fraction,
        warnings=tuple(warnings),
    )
