"""Document corpus: aligned documents plus the three embedding-derived matrices.

A corpus bundles n documents with three row-aligned matrices: high-dimensional
embeddings, low-dimensional projections, and per-document cluster membership
distributions. Row i of every matrix belongs to the i-th document. All
downstream coherence math consumes this structure read-only.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

SIMPLEX_TOL = 1e-6

MATRIX_MAGIC = b"NTM1"


class CorpusError(ValueError):
    """Raised when corpus files are malformed or violate corpus invariants."""


def parse_date(value: str) -> datetime:
    """Parse an ISO-8601 timestamp; date-only strings become midnight UTC."""
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError as exc:
        raise CorpusError(f"unparseable date {value!r}: {exc}") from None
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


@dataclass(frozen=True)
class Document:
    id: str
    date: datetime | None = None
    title: str | None = None
    text: str | None = None


@dataclass(frozen=True)
class Corpus:
    """Immutable bundle of documents and their three aligned matrices.

    Matrices are float64 in memory (the binary format stores float32; the
    promotion is exact). Membership rows lie on the probability simplex
    within SIMPLEX_TOL after ingest.
    """

    documents: tuple[Document, ...]
    embeddings: np.ndarray
    projections: np.ndarray
    memberships: np.ndarray
    _index: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        for arr in (self.embeddings, self.projections, self.memberships):
            arr.setflags(write=False)
        if not self._index:
            object.__setattr__(
                self, "_index", {d.id: i for i, d in enumerate(self.documents)}
            )

    def __len__(self) -> int:
        return len(self.documents)

    def index_of(self, doc_id: str) -> int:
        try:
            return self._index[doc_id]
        except KeyError:
            raise KeyError(f"unknown document id {doc_id!r}") from None

    def all_dated(self) -> bool:
        return all(d.date is not None for d in self.documents)


def read_matrix(path: str | Path) -> np.ndarray:
    """Read a matrix file (binary NTM1, or CSV when the name ends in .csv).

    Values are float32 on disk and promoted to float64. CSV input is passed
    through float32 as well so both formats ingest at identical precision.
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        data = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
        return data.astype(np.float32).astype(np.float64)
    raw = path.read_bytes()
    if len(raw) < 12 or raw[:4] != MATRIX_MAGIC:
        raise CorpusError(f"{path}: not a {MATRIX_MAGIC.decode()} matrix file")
    rows, cols = struct.unpack_from("<II", raw, 4)
    expected = 12 + 4 * rows * cols
    if len(raw) != expected:
        raise CorpusError(
            f"{path}: expected {expected} bytes for {rows}x{cols}, got {len(raw)}"
        )
    values = np.frombuffer(raw, dtype="<f4", offset=12)
    return values.reshape(rows, cols).astype(np.float64)


def write_matrix(path: str | Path, matrix: np.ndarray) -> None:
    """Write a matrix in the binary format (magic, u32 dims, float32 row-major)."""
    mat = np.ascontiguousarray(matrix, dtype=np.float32)
    if mat.ndim != 2:
        raise CorpusError("matrix must be 2-dimensional")
    rows, cols = mat.shape
    with open(path, "wb") as fh:
        fh.write(MATRIX_MAGIC)
        fh.write(struct.pack("<II", rows, cols))
        fh.write(mat.astype("<f4").tobytes(order="C"))


def load_documents(path: str | Path) -> list[Document]:
    """Read documents.jsonl: one object per line, required "id", optional
    "date"/"title"/"text". Line order defines row order."""
    docs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: bad JSON: {exc}") from None
            doc_id = obj.get("id")
            if not isinstance(doc_id, str) or not doc_id:
                raise CorpusError(f"{path}:{lineno}: missing or empty \"id\"")
            date = parse_date(obj["date"]) if obj.get("date") else None
            docs.append(
                Document(id=doc_id, date=date, title=obj.get("title"), text=obj.get("text"))
            )
    return docs


def write_documents(path: str | Path, documents) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in documents:
            obj: dict = {"id": doc.id}
            if doc.date is not None:
                obj["date"] = doc.date.astimezone(timezone.utc).isoformat()
            if doc.title is not None:
                obj["title"] = doc.title
            if doc.text is not None:
                obj["text"] = doc.text
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _absorb_membership_deficit(memberships: np.ndarray) -> np.ndarray:
    """Append an outlier column carrying each row's missing probability mass.

    Rows already summing to 1 (within tolerance) get a zero entry. Rows
    summing above 1 + tolerance are rejected. The deficit is preserved, not
    renormalized away, so near-outlier documents do not look artificially
    similar to each other.
    """
    sums = memberships.sum(axis=1)
    over = np.nonzero(sums > 1.0 + SIMPLEX_TOL)[0]
    if over.size:
        raise CorpusError(
            f"membership row {over[0]} sums to {sums[over[0]]:.9f} > 1 + {SIMPLEX_TOL}"
        )
    deficit = np.nonzero(sums < 1.0 - SIMPLEX_TOL)[0]
    if not deficit.size:
        return memberships
    outlier = np.zeros((memberships.shape[0], 1))
    outlier[deficit, 0] = 1.0 - sums[deficit]
    return np.hstack([memberships, outlier])


def _build_corpus(documents, embeddings, projections, memberships) -> Corpus:
    docs = tuple(documents)
    n = len(docs)
    seen: set[str] = set()
    for doc in docs:
        if doc.id in seen:
            raise CorpusError(f"duplicate document id {doc.id!r}")
        seen.add(doc.id)
    for name, mat in (
        ("embeddings", embeddings),
        ("projections", projections),
        ("memberships", memberships),
    ):
        if mat.shape[0] != n:
            raise CorpusError(
                f"{name} has {mat.shape[0]} rows but corpus has {n} documents"
            )
        if not np.isfinite(mat).all():
            raise CorpusError(f"{name} contains non-finite values")
    if projections.shape[1] >= embeddings.shape[1]:
        raise CorpusError(
            "projections must have fewer columns than embeddings "
            f"({projections.shape[1]} >= {embeddings.shape[1]})"
        )
    norms = np.linalg.norm(embeddings, axis=1)
    zero_rows = np.nonzero(norms == 0.0)[0]
    if zero_rows.size:
        raise CorpusError(f"embedding row {zero_rows[0]} is the zero vector")
    if (memberships < 0).any():
        row = int(np.nonzero((memberships < 0).any(axis=1))[0][0])
        raise CorpusError(f"membership row {row} has negative entries")
    memberships = _absorb_membership_deficit(memberships)
    return Corpus(
        documents=docs,
        embeddings=embeddings,
        projections=projections,
        memberships=memberships,
    )


def load_corpus(
    docs_path: str | Path,
    emb_path: str | Path,
    proj_path: str | Path,
    memb_path: str | Path,
) -> Corpus:
    """Load and validate a corpus from its four files.

    Raises CorpusError on duplicate ids, row-count mismatches, non-finite
    values, zero embedding rows, or membership rows summing above 1.
    """
    documents = load_documents(docs_path)
    embeddings = read_matrix(emb_path)
    projections = read_matrix(proj_path)
    memberships = read_matrix(memb_path)
    return _build_corpus(documents, embeddings, projections, memberships)


def corpus_from_arrays(documents, embeddings, projections, memberships) -> Corpus:
    """Build a validated Corpus directly from in-memory arrays."""
    return _build_corpus(
        documents,
        np.asarray(embeddings, dtype=np.float64),
        np.asarray(projections, dtype=np.float64),
        np.asarray(memberships, dtype=np.float64),
    )


@dataclass(frozen=True)
class AlignmentCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class AlignmentReport:
    checks: tuple[AlignmentCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[AlignmentCheck]:
        return [c for c in self.checks if not c.passed]


def validate_alignment(corpus: Corpus) -> AlignmentReport:
    """Re-assert every corpus invariant without mutating; failures are
    reported, never raised."""
    checks: list[AlignmentCheck] = []
    n = len(corpus)

    def add(name: str, passed: bool, detail: str = "") -> None:
        checks.append(AlignmentCheck(name, bool(passed), detail))

    row_ok = (
        corpus.embeddings.shape[0] == n
        and corpus.projections.shape[0] == n
        and corpus.memberships.shape[0] == n
    )
    add("row_counts", row_ok, f"n={n}")
    add(
        "unique_ids",
        len({d.id for d in corpus.documents}) == n and all(d.id for d in corpus.documents),
    )
    finite = all(
        np.isfinite(m).all()
        for m in (corpus.embeddings, corpus.projections, corpus.memberships)
    )
    add("finite_values", finite)
    sums = corpus.memberships.sum(axis=1)
    add(
        "membership_simplex",
        bool(np.all(np.abs(sums - 1.0) <= SIMPLEX_TOL)),
        f"max |sum-1| = {np.max(np.abs(sums - 1.0)):.3g}" if n else "",
    )
    add("membership_nonnegative", bool((corpus.memberships >= 0).all()))
    add("nonzero_embedding_rows", bool((np.linalg.norm(corpus.embeddings, axis=1) > 0).all()))
    add(
        "projection_narrower_than_embedding",
        corpus.projections.shape[1] < corpus.embeddings.shape[1],
    )
    return AlignmentReport(checks=tuple(checks))
