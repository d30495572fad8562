"""Command-line surface: build-graph, extract, evaluate.

All output files are deterministic for fixed inputs and seeds (timing goes
to stderr, never into files), embed the effective extraction configuration,
and carry a content hash of the graph cache they were derived from.

Exit codes: 0 success, 2 input/validation error, 3 no path, 4 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .coherence import CoherenceProvider
from .corpus import CorpusError, load_corpus, load_documents, read_matrix
from .graph import (
    ConstraintSet,
    build_max_spanning_tree,
    connectivity_report,
    edge_mask_from_ids,
    load_graph,
    save_graph,
    sparsify,
)
from .metrics import (
    EvalRow,
    EvaluationReport,
    dtw_align,
    dtw_similarity,
    ndtw_distance,
    random_baseline,
    shortest_simple_path,
    storyline_metrics,
)
from .pathfind import NoPathError, extract_trail, reduce_redundancy

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_PATH = 3
EXIT_IO = 4


@dataclass(frozen=True)
class ExtractionConfig:
    """Effective parameter set, echoed into every output file."""

    tau: float = 1.0
    delta: float = 0.2
    k: int = 3
    time_directed: bool = False
    edge_mask_path: str | None = None
    centrality_mode: str = "off"
    seed: int = 0

    def as_dict(self) -> dict:
        return {
            "tau": self.tau,
            "delta": self.delta,
            "k": self.k,
            "time_directed": self.time_directed,
            "edge_mask_path": self.edge_mask_path,
            "centrality_mode": self.centrality_mode,
            "seed": self.seed,
        }


def _resolve_config(args: argparse.Namespace) -> ExtractionConfig:
    """Merge built-in defaults, then the optional JSON config file, then
    explicit command-line flags (strongest)."""
    values = ExtractionConfig().as_dict()
    config_path = getattr(args, "config", None)
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(values)
        if unknown:
            raise CorpusError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    for key in values:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return ExtractionConfig(**values)


def _require(args: argparse.Namespace, names: list[str]) -> None:
    missing = [name for name in names if getattr(args, name.replace("-", "_"), None) is None]
    if missing:
        raise CorpusError("missing required flags: " + ", ".join(f"--{m}" for m in missing))


def _sha256_of(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_json(path: str | Path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _read_tsv_pairs(path: str | Path) -> list[tuple[str, str]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorpusError(f"{path}:{lineno}: expected 'src<TAB>dst'")
            pairs.append((parts[0], parts[1]))
    return pairs


def cmd_build_graph(args: argparse.Namespace) -> int:
    _require(args, ["docs", "embeddings", "projections", "memberships", "graph"])
    config = _resolve_config(args)
    corpus = load_corpus(args.docs, args.embeddings, args.projections, args.memberships)
    if config.time_directed:
        for doc in corpus.documents:
            if doc.date is None:
                raise CorpusError(
                    f"--time-directed requires dates; document {doc.id!r} has none"
                )
    mask = None
    if config.edge_mask_path:
        mask = edge_mask_from_ids(corpus, _read_tsv_pairs(config.edge_mask_path))
    constraints = ConstraintSet(
        time_directed=config.time_directed,
        edge_mask=mask,
        centrality_mode=config.centrality_mode,
    )
    started = time.perf_counter()
    provider = CoherenceProvider(corpus)
    tree = build_max_spanning_tree(provider)
    graph = sparsify(provider, tree, config.tau, constraints, corpus)
    save_graph(args.graph, graph)
    elapsed = time.perf_counter() - started
    components = connectivity_report(graph)
    report = {
        "n": graph.n,
        "edge_count": graph.edge_count,
        "omega": graph.omega,
        "component_count": components.count,
        "config": config.as_dict(),
        "graph_fingerprint": _sha256_of(args.graph),
    }
    print(f"build-graph: n={graph.n} edges={graph.edge_count} in {elapsed:.2f}s", file=sys.stderr)
    if args.out:
        _write_json(args.out, report)
    else:
        print(json.dumps(report, indent=2))
    return EXIT_OK


def _document_index(documents) -> dict[str, int]:
    index: dict[str, int] = {}
    for i, doc in enumerate(documents):
        if doc.id in index:
            raise CorpusError(f"duplicate document id {doc.id!r}")
        index[doc.id] = i
    return index


def _storyline_obj(storyline, documents, projections, reduced: bool) -> dict:
    obj = {
        "documents": [documents[i].id for i in storyline.nodes],
        "edge_weights": list(storyline.edge_weights),
        "bottleneck": storyline.bottleneck,
        "reliability": storyline.reliability,
        "reduced": reduced,
    }
    if projections is not None:
        obj["projection_2d"] = [
            [float(x) for x in projections[i, :2]] for i in storyline.nodes
        ]
    return obj


def _extract_one(graph, documents, projections, config, s, t, reduce_flag) -> dict:
    trail = extract_trail(graph, s, t, config.k)
    doc = {
        "source": documents[s].id,
        "target": documents[t].id,
        "k": config.k,
        "exhausted": trail.exhausted,
        "storylines": [
            _storyline_obj(st, documents, projections, False) for st in trail.storylines
        ],
    }
    if reduce_flag:
        doc["reduced_storylines"] = [
            _storyline_obj(reduce_redundancy(st, graph, config.delta), documents, projections, True)
            for st in trail.storylines
        ]
    return doc


def cmd_extract(args: argparse.Namespace) -> int:
    _require(args, ["docs", "graph"])
    config = _resolve_config(args)
    documents = load_documents(args.docs)
    index = _document_index(documents)
    graph = load_graph(args.graph)
    # the cache records how the graph was actually built; echo that, not
    # this command's defaults
    config = ExtractionConfig(
        **{
            **config.as_dict(),
            "tau": graph.tau,
            "time_directed": graph.constraints.time_directed,
            "centrality_mode": graph.constraints.centrality_mode,
        }
    )
    if graph.n != len(documents):
        raise CorpusError(
            f"graph cache has {graph.n} nodes but corpus has {len(documents)} documents"
        )
    projections = None
    if args.projections:
        projections = read_matrix(args.projections)
        if projections.shape[0] != len(documents):
            raise CorpusError("projections row count does not match documents")
    fingerprint = _sha256_of(args.graph)

    def resolve(doc_id: str) -> int:
        if doc_id not in index:
            raise CorpusError(f"unknown document id {doc_id!r}")
        return index[doc_id]

    common = {"config": config.as_dict(), "graph_fingerprint": fingerprint}
    if args.pairs:
        results = []
        failures = 0
        for sid, tid in _read_tsv_pairs(args.pairs):
            s, t = resolve(sid), resolve(tid)
            try:
                one = _extract_one(graph, documents, projections, config, s, t, args.reduce)
            except NoPathError as exc:
                failures += 1
                one = {"source": sid, "target": tid, "error": f"no-path: {exc}"}
            results.append({**one, **common})
        payload: object = results
        status = EXIT_NO_PATH if results and failures == len(results) else EXIT_OK
    else:
        _require(args, ["source", "target"])
        s, t = resolve(args.source), resolve(args.target)
        payload = {**_extract_one(graph, documents, projections, config, s, t, args.reduce), **common}
        status = EXIT_OK
    if args.out:
        _write_json(args.out, payload)
    else:
        print(json.dumps(payload, indent=2))
    return status


def _load_trail_doc(path: str | Path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if isinstance(doc, list):
        raise CorpusError(f"{path}: evaluate expects a single-trail document, not a batch")
    for key in ("source", "target", "storylines"):
        if key not in doc:
            raise CorpusError(f"{path}: trail document missing {key!r}")
    return doc


def _trail_sequences(doc: dict) -> list[tuple[str, int, list[str]]]:
    """(method, index, document ids) for every storyline in a trail file."""
    out = []
    for label, key in (("trail", "storylines"), ("trail-reduced", "reduced_storylines")):
        for i, entry in enumerate(doc.get(key) or []):
            ids = entry["documents"]
            if len(ids) < 2:
                raise CorpusError(f"storyline {label}[{i}] has fewer than 2 documents")
            out.append((label, i, ids))
    return out


def cmd_evaluate(args: argparse.Namespace) -> int:
    _require(args, ["docs", "embeddings", "projections", "memberships", "trail", "out"])
    if args.dtw_space and not args.reference:
        raise CorpusError("--dtw-space requires --reference (DTW needs a reference trail)")
    corpus = load_corpus(args.docs, args.embeddings, args.projections, args.memberships)
    provider = CoherenceProvider(corpus)
    trail_doc = _load_trail_doc(args.trail)
    base_config = ExtractionConfig().as_dict()
    base_config.update(trail_doc.get("config") or {})
    if args.seed is not None:
        base_config["seed"] = args.seed
    config = ExtractionConfig(**base_config)
    s = corpus.index_of(trail_doc["source"])
    t = corpus.index_of(trail_doc["target"])

    reference_seqs: list[list[int]] | None = None
    if args.reference:
        ref_doc = _load_trail_doc(args.reference)
        reference_seqs = [
            [corpus.index_of(d) for d in ids]
            for label, _, ids in _trail_sequences(ref_doc)
            if label == "trail"
        ]
        if not reference_seqs:
            raise CorpusError(f"{args.reference}: reference has no storylines")
    dtw_space = args.dtw_space or "lo"
    points = corpus.projections if dtw_space == "lo" else corpus.embeddings

    baselines = []
    if args.baselines:
        baselines = [b.strip() for b in args.baselines.split(",") if b.strip()]
        unknown = set(baselines) - {"random", "shortest"}
        if unknown:
            raise CorpusError(f"unknown baselines: {sorted(unknown)}")
    graph = None
    if "shortest" in baselines:
        if not args.graph:
            raise CorpusError("baseline 'shortest' needs --graph")
        graph = load_graph(args.graph)

    def build_row(method: str, idx: int, seq: list[int]) -> EvalRow:
        min_coh, reliability = storyline_metrics(seq, provider)
        sim = ndtw = space = None
        if reference_seqs is not None:
            ref = reference_seqs[min(idx, len(reference_seqs) - 1)]
            alignment = dtw_align(points[seq], points[ref])
            sim = dtw_similarity(points[seq], points[ref], alignment)
            ndtw = ndtw_distance(alignment)
            space = dtw_space
        return EvalRow(
            method=method,
            storyline_index=idx,
            source=corpus.documents[seq[0]].id,
            target=corpus.documents[seq[-1]].id,
            length=len(seq),
            min_coherence=min_coh,
            reliability=reliability,
            dtw_similarity=sim,
            ndtw_distance=ndtw,
            dtw_space=space,
        )

    rows: list[EvalRow] = []
    trail_lengths: list[int] = []
    for label, idx, ids in _trail_sequences(trail_doc):
        seq = [corpus.index_of(d) for d in ids]
        if label == "trail":
            trail_lengths.append(len(seq))
        rows.append(build_row(label, idx, seq))
    if "random" in baselines:
        for idx, length in enumerate(trail_lengths):
            seq = list(
                random_baseline(
                    corpus, s, t, length, config.seed + idx, config.time_directed
                )
            )
            rows.append(build_row("random", idx, seq))
    if "shortest" in baselines:
        rows.append(build_row("shortest", 0, list(shortest_simple_path(graph, s, t))))

    report = EvaluationReport(
        rows=tuple(rows),
        config=config.as_dict(),
        graph_fingerprint=trail_doc.get("graph_fingerprint"),
    )
    _write_json(f"{args.out}.json", report.to_json_obj())
    with open(f"{args.out}.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report.to_csv_text())
    return EXIT_OK


def _add_shared_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--docs", help="documents.jsonl path")
    sub.add_argument("--embeddings", help="high-dimensional embedding matrix")
    sub.add_argument("--projections", help="low-dimensional projection matrix")
    sub.add_argument("--memberships", help="cluster membership matrix")
    sub.add_argument("--graph", help="graph cache path (written by build-graph)")
    sub.add_argument("--out", help="output path (prefix for evaluate)")
    sub.add_argument("--config", help="optional JSON config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storytrails",
        description="Extract coherent storylines between two documents over "
        "a sparse semantic coherence graph.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    build = commands.add_parser("build-graph", help="build and cache the sparse coherence graph")
    _add_shared_flags(build)
    build.add_argument("--tau", type=float, help="bottleneck scale (default 1.0)")
    build.add_argument(
        "--time-directed",
        dest="time_directed",
        action="store_const",
        const=True,
        help="admit only chronologically forward edges",
    )
    build.add_argument("--edge-mask", dest="edge_mask_path", help="TSV of allowed 'src<TAB>dst' id pairs")
    build.add_argument(
        "--centrality",
        dest="centrality_mode",
        choices=("off", "source", "target"),
        help="rescale edges by closeness centrality (default off)",
    )
    build.set_defaults(handler=cmd_build_graph)

    extract = commands.add_parser("extract", help="extract a narrative trail between two documents")
    _add_shared_flags(extract)
    extract.add_argument("--source", help="source document id")
    extract.add_argument("--target", help="target document id")
    extract.add_argument("--k", type=int, help="number of disjoint storylines (default 3)")
    extract.add_argument("--reduce", action="store_true", help="also emit redundancy-reduced storylines")
    extract.add_argument("--delta", type=float, help="redundancy threshold (default 0.2)")
    extract.add_argument("--pairs", help="TSV of 'src<TAB>dst' id pairs for batch extraction")
    extract.add_argument("--seed", type=int, help="seed echoed into outputs")
    extract.set_defaults(handler=cmd_extract)

    evaluate = commands.add_parser("evaluate", help="score a trail and optional baselines")
    _add_shared_flags(evaluate)
    evaluate.add_argument("--trail", help="trail JSON produced by extract")
    evaluate.add_argument("--reference", help="reference trail JSON for DTW metrics")
    evaluate.add_argument("--baselines", help="comma list from: random, shortest")
    evaluate.add_argument("--seed", type=int, help="seed for the random baseline")
    evaluate.add_argument("--dtw-space", dest="dtw_space", choices=("lo", "hi"),
                          help="DTW point space: projections (lo) or embeddings (hi)")
    evaluate.set_defaults(handler=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except NoPathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_PATH
    except (CorpusError, ValueError, KeyError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
