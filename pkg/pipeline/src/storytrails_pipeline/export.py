"""Export the corpus files the core package ingests.

Matrix files use the NTM1 binary layout (magic bytes, u32 dims, float32
row-major little-endian). A manifest records every knob that shaped the
corpus so downstream results are traceable.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .documents import write_documents
from .reduce_cluster import ProjectionResult

MATRIX_MAGIC = b"NTM1"


def write_matrix(path: str | Path, matrix: np.ndarray) -> None:
    mat = np.ascontiguousarray(matrix, dtype=np.float32)
    if mat.ndim != 2:
        raise ValueError("matrix must be 2-dimensional")
    rows, cols = mat.shape
    with open(path, "wb") as fh:
        fh.write(MATRIX_MAGIC)
        fh.write(struct.pack("<II", rows, cols))
        fh.write(mat.astype("<f4").tobytes(order="C"))


def export_corpus(
    documents,
    embeddings: np.ndarray,
    result: ProjectionResult,
    out_dir: str | Path,
    config: PipelineConfig,
) -> dict:
    """Write documents.jsonl, the three core matrices, the full-width
    projection used for clustering, and manifest.json. Returns the manifest.

    projections.ntm holds the 2-dim display projection (what the core loads
    by default); projections_full.ntm keeps the m-dim projection for
    sensitivity analyses. Misaligned row counts are refused.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = len(documents)
    matrices = {
        "embeddings.ntm": np.asarray(embeddings),
        "projections.ntm": result.display,
        "projections_full.ntm": result.projection,
        "memberships.ntm": result.memberships,
    }
    for name, mat in matrices.items():
        if mat.shape[0] != n:
            raise ValueError(f"{name} has {mat.shape[0]} rows for {n} documents")
    write_documents(out_dir / "documents.jsonl", documents)
    for name, mat in matrices.items():
        write_matrix(out_dir / name, mat)
    manifest = {
        "n": n,
        "provider": config.provider,
        "model": config.model,
        "seed": config.seed,
        "embedding_dims": int(np.asarray(embeddings).shape[1]),
        "projection_dims": int(result.projection.shape[1]),
        "display_dims": int(result.display.shape[1]),
        "min_cluster_size": config.min_cluster_size,
        "cluster_count": result.cluster_count,
        "noise_fraction": result.noise_fraction,
        "warnings": list(result.warnings),
        "files": {
            "documents": "documents.jsonl",
            "embeddings": "embeddings.ntm",
            "projections": "projections.ntm",
            "projections_full": "projections_full.ntm",
            "memberships": "memberships.ntm",
        },
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
