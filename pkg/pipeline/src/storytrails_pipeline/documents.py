"""Reading and writing documents.jsonl (the corpus interchange format)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class RawDocument:
    id: str
    date: str | None = None
    title: str | None = None
    text: str | None = None

    @property
    def embedding_text(self) -> str:
        """Content sent to the embedding provider: text, else title, else id."""
        return self.text or self.title or self.id


def read_documents(path: str | Path) -> list[RawDocument]:
    docs = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            doc_id = obj.get("id")
            if not isinstance(doc_id, str) or not doc_id:
                raise ValueError(f"{path}:{lineno}: missing or empty \"id\"")
            if doc_id in seen:
                raise ValueError(f"{path}:{lineno}: duplicate id {doc_id!r}")
            seen.add(doc_id)
            docs.append(
                RawDocument(
                    id=doc_id,
                    date=obj.get("date"),
                    title=obj.get("title"),
                    text=obj.get("text"),
                )
            )
    return docs


def write_documents(path: str | Path, documents) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in documents:
            obj: dict = {"id": doc.id}
            for field in ("date", "title", "text"):
                value = getattr(doc, field)
                if value is not None:
                    obj[field] = value
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
