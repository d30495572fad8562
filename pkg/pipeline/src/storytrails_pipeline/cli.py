"""Command line for the data-preparation pipeline."""

from __future__ import annotations

import argparse
import sys

from .config import PROVIDERS, PipelineConfig
from .documents import read_documents
from .embed import EmbeddingError, embed_documents
from .export import export_corpus
from .reduce_cluster import project_and_cluster


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storytrails-pipeline",
        description="Embed documents, project, soft-cluster, and export the "
        "corpus files consumed by the storytrails core.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    run = commands.add_parser("run", help="run the full pipeline")
    run.add_argument("--docs", required=True, help="input documents.jsonl")
    run.add_argument("--out-dir", required=True, help="directory for the exported corpus")
    run.add_argument("--provider", choices=PROVIDERS, default="remote-api",
                     help="embedding source (remote-api reads OPENAI_API_KEY / OPENAI_BASE_URL)")
    run.add_argument("--model", default="text-embedding-3-small")
    run.add_argument("--batch-size", type=int, default=64)
    run.add_argument("--dims", type=int, default=48, help="projection dims used for clustering")
    run.add_argument("--display-dims", type=int, default=2)
    run.add_argument("--min-cluster-size", type=int, default=5)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--cache-dir", default=".embed-cache")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = PipelineConfig(
        provider=args.provider,
        model=args.model,
        batch_size=args.batch_size,
        projection_dims=args.dims,
        display_dims=args.display_dims,
        min_cluster_size=args.min_cluster_size,
        seed=args.seed,
        cache_dir=args.cache_dir,
    )
    try:
        documents = read_documents(args.docs)
        embeddings = embed_documents(documents, config)
        result = project_and_cluster(embeddings, config)
        manifest = export_corpus(documents, embeddings, result, args.out_dir, config)
    except (EmbeddingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(
        f"exported {manifest['n']} documents to {args.out_dir} "
        f"({manifest['cluster_count']} clusters, "
        f"{manifest['noise_fraction']:.1%} noise)"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
