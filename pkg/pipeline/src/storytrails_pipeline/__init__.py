"""Data preparation for storytrails corpora: embed, project, cluster, export."""

from .config import PipelineConfig
from .documents import RawDocument, read_documents, write_documents
from .embed import (
    EmbeddingError,
    HashedProvider,
    LocalModelProvider,
    RemoteApiProvider,
    embed_documents,
)
from .export import export_corpus, write_matrix
from .reduce_cluster import ProjectionResult, project_and_cluster

__version__ = "0.1.0"

__all__ = [
    "EmbeddingError",
    "HashedProvider",
    "LocalModelProvider",
    "PipelineConfig",
    "ProjectionResult",
    "RawDocument",
    "RemoteApiProvider",
    "embed_documents",
    "export_corpus",
    "project_and_cluster",
    "read_documents",
    "write_documents",
    "write_matrix",
]
