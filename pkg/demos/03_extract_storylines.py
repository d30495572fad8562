"""Extract storylines between two documents.

Runs the maximin search for the single best storyline, then a trail of
k interior-disjoint storylines, then the redundancy-reduction pass.
"""

from storytrails import (
    CoherenceProvider,
    ConstraintSet,
    build_max_spanning_tree,
    extract_trail,
    reduce_redundancy,
    sparsify,
    widest_path,
)

from corpus_factory import make_demo_corpus

corpus, labels = make_demo_corpus(n=120, seed=0)
provider = CoherenceProvider(corpus)
tree = build_max_spanning_tree(provider)
# tau=1 guarantees one storyline; backing off a little keeps more edges so
# several interior-disjoint routes and shortcut edges exist for the demo
graph = sparsify(provider, tree, 0.9, ConstraintSet(), corpus)

# endpoints from different topic blobs so the path has to bridge clusters
source = int(next(i for i in range(len(corpus)) if labels[i] == 0))
target = int(next(i for i in range(len(corpus)) if labels[i] == 3))
sid = corpus.documents[source].id
tid = corpus.documents[target].id
print(f"extracting {sid} ({corpus.documents[source].title}) -> "
      f"{tid} ({corpus.documents[target].title})\n")


def show(tag, storyline):
    ids = " > ".join(corpus.documents[i].id for i in storyline.nodes)
    print(f"{tag}: {ids}")
    print(f"    bottleneck {storyline.bottleneck:.4f}  "
          f"reliability {storyline.reliability:.4f}  "
          f"{len(storyline.nodes)} documents")


best = widest_path(graph, source, target)
show("widest path", best)

trail = extract_trail(graph, source, target, k=3)
print(f"\ntrail with k=3 (exhausted: {trail.exhausted}):")
for rank, storyline in enumerate(trail.storylines, start=1):
    show(f"  storyline {rank}", storyline)

print("\nafter redundancy reduction (delta = 0.2):")
for rank, storyline in enumerate(trail.storylines, start=1):
    show(f"  storyline {rank}", reduce_redundancy(storyline, graph, delta=0.2))
