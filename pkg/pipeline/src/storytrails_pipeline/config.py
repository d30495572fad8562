"""Pipeline configuration."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

PROVIDERS = ("remote-api", "local-model", "hashed")


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs for the embed -> project -> cluster -> export pipeline.

    The seed and every dimension end up in the output manifest so a corpus
    can be traced back to the run that produced it. The "hashed" provider
    generates deterministic pseudo-embeddings from content hashes; it exists
    so the pipeline can run offline (tests, demos, format checks).
    """

    provider: str = "remote-api"
    model: str = "text-embedding-3-small"
    batch_size: int = 64
    projection_dims: int = 48
    display_dims: int = 2
    min_cluster_size: int = 5
    seed: int = 0
    cache_dir: str = ".embed-cache"

    def __post_init__(self):
        if self.provider not in PROVIDERS:
            raise ValueError(f"unknown provider {self.provider!r}; expected one of {PROVIDERS}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.display_dims > self.projection_dims:
            raise ValueError("display_dims cannot exceed projection_dims")

    @property
    def cache_path(self) -> Path:
        return Path(self.cache_dir)
