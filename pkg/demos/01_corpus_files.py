"""Write a synthetic corpus to the portable on-disk formats and load it back.

Shows the four corpus files (documents.jsonl plus three binary matrices),
the validation report, and the outlier-mass handling for membership rows
that do not sum to one.
"""

from pathlib import Path

import numpy as np

from storytrails import load_corpus, validate_alignment
from storytrails.corpus import write_documents, write_matrix

from corpus_factory import make_demo_corpus

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

corpus, _ = make_demo_corpus(n=120, seed=0)

# Shave some membership mass off a few rows to show the outlier column:
# density clustering leaves near-noise documents with mass below one.
memberships = corpus.memberships.copy()
memberships[:5] *= 0.75

write_documents(out / "documents.jsonl", corpus.documents)
write_matrix(out / "embeddings.ntm", corpus.embeddings)
write_matrix(out / "projections.ntm", corpus.projections)
write_matrix(out / "memberships.ntm", memberships)
print(f"wrote 4 corpus files to {out}/")

loaded = load_corpus(
    out / "documents.jsonl",
    out / "embeddings.ntm",
    out / "projections.ntm",
    out / "memberships.ntm",
)
print(f"loaded {len(loaded)} documents")
print(f"membership matrix widened to {loaded.memberships.shape[1]} columns "
      f"(outlier mass column appended)")
print(f"row 0 outlier mass: {loaded.memberships[0, -1]:.4f}")
print(f"row sums all within 1e-6 of 1: "
      f"{bool(np.all(np.abs(loaded.memberships.sum(axis=1) - 1) <= 1e-6))}")

report = validate_alignment(loaded)
print("\nvalidation report:")
for check in report.checks:
    print(f"  {'ok ' if check.passed else 'FAIL'} {check.name} {check.detail}")
