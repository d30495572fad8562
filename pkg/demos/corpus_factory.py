"""Synthetic corpus shared by the demo scripts.

Documents are drawn from Gaussian topic blobs so storylines have real
cluster structure to work with: same-blob pairs are highly coherent,
cross-blob pairs much less so.
"""

from datetime import datetime, timedelta, timezone

import numpy as np

from storytrails import Document, corpus_from_arrays

TOPICS = ["solar", "storage", "policy", "markets", "materials", "transport"]


def make_demo_corpus(n=120, clusters=6, dim_hi=16, seed=0, dated=True):
    rng = np.random.default_rng(seed)
    centers = rng.normal(scale=4.0, size=(clusters, dim_hi))
    labels = rng.integers(0, clusters, size=n)
    embeddings = centers[labels] + rng.normal(scale=0.6, size=(n, dim_hi))

    distances = np.linalg.norm(embeddings[:, None, :] - centers[None, :, :], axis=2)
    affinity = 1.0 / (1.0 + (distances / np.median(distances)) ** 2)
    memberships = affinity / affinity.sum(axis=1, keepdims=True)

    projections = embeddings @ rng.normal(size=(dim_hi, 2))

    start = datetime(2021, 6, 1, tzinfo=timezone.utc)
    documents = []
    for i in range(n):
        topic = TOPICS[labels[i] % len(TOPICS)]
        documents.append(
            Document(
                id=f"doc-{i:04d}",
                date=start + timedelta(days=int(i)) if dated else None,
                title=f"{topic} update {i}",
            )
        )
    return corpus_from_arrays(documents, embeddings, projections, memberships), labels
