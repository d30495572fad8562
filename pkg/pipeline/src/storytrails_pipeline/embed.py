"""Document embedding with batching, retries, and a content-addressed disk
cache.

Cache entries are keyed by sha256(model NUL text), so editing one document
re-embeds only that document and switching models never serves stale
vectors. Failed batches are retried with exponential backoff; the error
after the final attempt names the batch and the document range it covered.
"""

from __future__ import annotations

import hashlib
import os
import time

import numpy as np

from .config import PipelineConfig

MAX_ATTEMPTS = 5


class EmbeddingError(RuntimeError):
    """A batch could not be embedded after all retry attempts."""


def _cache_key(model: str, text: str) -> str:
    return hashlib.sha256(model.encode() + b"\x00" + text.encode()).hexdigest()


class RemoteApiProvider:
    """OpenAI-compatible embeddings endpoint.

    Reads OPENAI_API_KEY and optionally OPENAI_BASE_URL from the
    environment; any server exposing POST /embeddings with the same wire
    format works.
    """

    def __init__(self, model: str):
        import requests

        self._requests = requests
        self.model = model
        self.base_url = os.environ.get("OPENAI_BASE_URL", "https://api.openai.com/v1")
        key = os.environ.get("OPENAI_API_KEY")
        if not key:
            raise EmbeddingError("remote-api provider needs OPENAI_API_KEY in the environment")
        self._headers = {"Authorization": f"Bearer {key}"}

    def __call__(self, texts: list[str]) -> np.ndarray:
        response = self._requests.post(
            f"{self.base_url.rstrip('/')}/embeddings",
            json={"model": self.model, "input": texts},
            headers=self._headers,
            timeout=120,
        )
        response.raise_for_status()
        payload = response.json()["data"]
        payload.sort(key=lambda item: item["index"])
        return np.asarray([item["embedding"] for item in payload], dtype=np.float64)


class LocalModelProvider:
    """Sentence-transformers model; the package must be installed and the
    model weights available locally."""

    def __init__(self, model: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise EmbeddingError(
                "local-model provider needs the sentence-transformers package"
            ) from exc
        self.model = model
        self._encoder = SentenceTransformer(model)

    def __call__(self, texts: list[str]) -> np.ndarray:
        return np.asarray(self._encoder.encode(list(texts)), dtype=np.float64)


class HashedProvider:
    """Deterministic pseudo-embeddings derived from content hashes.

    No semantics, stable across machines; lets the full pipeline run
    offline for format and plumbing checks.
    """

    def __init__(self, model: str, dim: int = 256):
        self.model = model
        self.dim = dim

    def __call__(self, texts: list[str]) -> np.ndarray:
        rows = []
        for text in texts:
            digest = hashlib.sha256(f"{self.model}\x00{text}".encode()).digest()
            rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
            rows.append(rng.standard_normal(self.dim))
        return np.asarray(rows)


def make_provider(config: PipelineConfig):
    if config.provider == "remote-api":
        return RemoteApiProvider(config.model)
    if config.provider == "local-model":
        return LocalModelProvider(config.model)
    return HashedProvider(config.model)


def embed_documents(documents, config: PipelineConfig, provider=None, sleep=time.sleep) -> np.ndarray:
    """One embedding row per document, in document order.

    Only cache misses are sent to the provider, in batches of
    config.batch_size, each retried up to MAX_ATTEMPTS times with
    exponential backoff. Fresh vectors are written back to the cache.
    """
    if provider is None:
        provider = make_provider(config)
    cache_dir = config.cache_path
    cache_dir.mkdir(parents=True, exist_ok=True)
    texts = [doc.embedding_text for doc in documents]
    keys = [_cache_key(config.model, text) for text in texts]

    vectors: dict[int, np.ndarray] = {}
    missing: list[int] = []
    for i, key in enumerate(keys):
        path = cache_dir / f"{key}.npy"
        if path.exists():
            vectors[i] = np.load(path)
        else:
            missing.append(i)

    for batch_no, start in enumerate(range(0, len(missing), config.batch_size)):
        batch = missing[start : start + config.batch_size]
        batch_texts = [texts[i] for i in batch]
        last_error: Exception | None = None
        for attempt in range(MAX_ATTEMPTS):
            try:
                result = np.asarray(provider(batch_texts), dtype=np.float64)
                break
            except Exception as exc:
                last_error = exc
                if attempt + 1 < MAX_ATTEMPTS:
                    sleep(0.5 * 2**attempt)
        else:
            raise EmbeddingError(
                f"batch {batch_no} (documents {batch[0]}..{batch[-1]}) failed "
                f"after {MAX_ATTEMPTS} attempts: {last_error}"
            )
        if result.shape[0] != len(batch):
            raise EmbeddingError(
                f"batch {batch_no}: provider returned {result.shape[0]} vectors "
                f"for {len(batch)} inputs"
            )
        for i, row in zip(batch, result):
            vectors[i] = row
            np.save(cache_dir / f"{keys[i]}.npy", row)

    dims = {v.shape[0] for v in vectors.values()}
    if len(dims) != 1:
        raise EmbeddingError(f"inconsistent embedding dimensions in cache/provider: {sorted(dims)}")
    return np.stack([vectors[i] for i in range(len(documents))])
