"""Drive the command-line pipeline end to end.

Writes a corpus to disk, then runs build-graph, extract, and evaluate the
way a shell script would, and prints the artifacts they produce.
"""

import json
import subprocess
import sys
from pathlib import Path

from storytrails.corpus import write_documents, write_matrix

from corpus_factory import make_demo_corpus

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

corpus, _ = make_demo_corpus(n=100, seed=3)
write_documents(out / "documents.jsonl", corpus.documents)
write_matrix(out / "embeddings.ntm", corpus.embeddings)
write_matrix(out / "projections.ntm", corpus.projections)
write_matrix(out / "memberships.ntm", corpus.memberships)

shared = [
    "--docs", str(out / "documents.jsonl"),
    "--embeddings", str(out / "embeddings.ntm"),
    "--projections", str(out / "projections.ntm"),
    "--memberships", str(out / "memberships.ntm"),
]


def run(*args):
    cmd = [sys.executable, "-m", "storytrails.cli", *args]
    print("$ storytrails " + " ".join(args))
    subprocess.run(cmd, check=True)


run("build-graph", *shared,
    "--graph", str(out / "graph.ntg"), "--out", str(out / "build.json"),
    "--time-directed")

run("extract",
    "--docs", str(out / "documents.jsonl"),
    "--graph", str(out / "graph.ntg"),
    "--projections", str(out / "projections.ntm"),
    "--source", "doc-0000", "--target", "doc-0099",
    "--k", "3", "--reduce", "--out", str(out / "trail.json"))

run("evaluate", *shared,
    "--graph", str(out / "graph.ntg"),
    "--trail", str(out / "trail.json"),
    "--reference", str(out / "trail.json"),
    "--baselines", "random,shortest", "--seed", "0",
    "--out", str(out / "eval"))

trail = json.loads((out / "trail.json").read_text())
print(f"\ntrail: {len(trail['storylines'])} storylines, exhausted={trail['exhausted']}")
for storyline in trail["storylines"]:
    print("  " + " > ".join(storyline["documents"]))
print(f"\nevaluation rows ({out / 'eval.csv'}):")
print((out / "eval.csv").read_text())
