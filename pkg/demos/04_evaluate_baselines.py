"""Score storylines against the baselines.

Extracts storylines for a handful of document pairs and compares minimum
coherence and reliability against random sampling and shortest simple
paths, plus DTW alignment between the methods' storylines.
"""

import numpy as np

from storytrails import (
    CoherenceProvider,
    ConstraintSet,
    build_max_spanning_tree,
    dtw_align,
    dtw_similarity,
    ndtw_distance,
    random_baseline,
    shortest_simple_path,
    sparsify,
    storyline_metrics,
    widest_path,
)

from corpus_factory import make_demo_corpus

corpus, _ = make_demo_corpus(n=150, seed=1)
provider = CoherenceProvider(corpus)
tree = build_max_spanning_tree(provider)
graph = sparsify(provider, tree, 1.0, ConstraintSet(), corpus)

rng = np.random.default_rng(7)
scores = {"trail": [], "shortest": [], "random": []}
for trial in range(25):
    s, t = rng.choice(len(corpus), size=2, replace=False)
    s, t = int(s), int(t)
    trail_nodes = widest_path(graph, s, t).nodes
    scores["trail"].append(storyline_metrics(trail_nodes, provider))
    scores["shortest"].append(
        storyline_metrics(shortest_simple_path(graph, s, t), provider)
    )
    sampled = random_baseline(corpus, s, t, len(trail_nodes), seed=trial)
    scores["random"].append(storyline_metrics(sampled, provider))

print(f"{'method':<10} {'min coherence':>14} {'reliability':>12}")
for method, values in scores.items():
    mins, rels = zip(*values)
    print(f"{method:<10} {np.mean(mins):>14.3f} {np.mean(rels):>12.3f}")

# DTW between a trail storyline and the shortest path for one pair
s, t = 0, len(corpus) - 1
a = widest_path(graph, s, t).nodes
b = shortest_simple_path(graph, s, t)
pa, pb = corpus.projections[list(a)], corpus.projections[list(b)]
alignment = dtw_align(pa, pb)
print(f"\nDTW between trail ({len(a)} docs) and shortest path ({len(b)} docs):")
print(f"  matched pairs: {len(alignment.pairs)}")
print(f"  nDTW distance: {ndtw_distance(alignment):.3f}")
print(f"  DTW similarity: {dtw_similarity(pa, pb, alignment):.3f}")
