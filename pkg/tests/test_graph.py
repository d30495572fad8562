"""Maximum spanning tree, sparsification, constraints, centrality, and the
graph cache format."""

import itertools

import numpy as np
import pytest

from storytrails import (
    CoherenceProvider,
    ConstraintSet,
    Document,
    build_max_spanning_tree,
    centrality_weights,
    closeness_centralities,
    connectivity_report,
    corpus_from_arrays,
    edge_mask_from_ids,
    load_graph,
    max_spanning_tree_of_matrix,
    save_graph,
    sparsify,
)

from conftest import MatrixProvider, graph_from_edges, make_random_corpus


def triangle_provider():
    #  (a,b)=0.9, (b,c)=0.8, (a,c)=0.3
    m = np.array([
        [1.0, 0.9, 0.3],
        [0.9, 1.0, 0.8],
        [0.3, 0.8, 1.0],
    ])
    return MatrixProvider(m)


def enumerate_spanning_trees(weights):
    """All spanning trees (as edge tuples) of a complete weighted graph by
    brute-force subset enumeration."""
    n = weights.shape[0]
    all_edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    trees = []
    for subset in itertools.combinations(all_edges, n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for u, v in subset:
            ru, rv = find(u), find(v)
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        if ok:
            trees.append(subset)
    return trees


def kruskal_max_total(weights):
    """Independent Kruskal implementation; returns the max total weight."""
    n = weights.shape[0]
    edges = sorted(
        ((weights[u, v], u, v) for u in range(n) for v in range(u + 1, n)),
        reverse=True,
    )
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    total = 0.0
    taken = 0
    for w, u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            total += w
            taken += 1
            if taken == n - 1:
                break
    return total


def test_triangle_tree_matches_enumeration():
    provider = triangle_provider()
    tree = build_max_spanning_tree(provider)
    assert {(u, v) for u, v, _ in tree.edges} == {(0, 1), (1, 2)}
    assert tree.bottleneck_weight == 0.8
    # oracle: best of the three possible spanning trees
    trees = enumerate_spanning_trees(provider.matrix)
    best = max(trees, key=lambda t: sum(provider.matrix[u, v] for u, v in t))
    assert {(u, v) for u, v, _ in tree.edges} == set(best)


def test_two_node_tree():
    tree = build_max_spanning_tree(MatrixProvider([[1.0, 0.4], [0.4, 1.0]]))
    assert tree.edges == ((0, 1, 0.4),)
    assert tree.bottleneck_weight == 0.4


def test_single_node_rejected():
    with pytest.raises(ValueError, match="at least 2"):
        build_max_spanning_tree(MatrixProvider([[1.0]]))


def test_all_equal_weights_any_tree():
    m = np.full((5, 5), 0.6)
    np.fill_diagonal(m, 1.0)
    tree = build_max_spanning_tree(MatrixProvider(m))
    assert len(tree.edges) == 4
    assert tree.bottleneck_weight == 0.6
    # spans all nodes
    nodes = {x for u, v, _ in tree.edges for x in (u, v)}
    assert nodes == set(range(5))


def test_exhaustive_total_weight_small_instances():
    rng = np.random.default_rng(17)
    for n in range(3, 8):
        m = rng.uniform(0.01, 1.0, size=(n, n))
        m = (m + m.T) / 2
        np.fill_diagonal(m, 1.0)
        tree = build_max_spanning_tree(MatrixProvider(m))
        best_total = max(
            sum(m[u, v] for u, v in t) for t in enumerate_spanning_trees(m)
        )
        assert tree.total_weight == pytest.approx(best_total, abs=1e-12)


def test_dense_prim_matches_kruskal_totals():
    rng = np.random.default_rng(23)
    for n in (10, 40, 200):
        m = rng.uniform(0.0, 1.0, size=(n, n))
        m = (m + m.T) / 2
        np.fill_diagonal(m, 1.0)
        tree = max_spanning_tree_of_matrix(m)
        assert abs(tree.total_weight - kruskal_max_total(m)) <= 1e-9


def _corpus_of(n, dated=False):
    rng = np.random.default_rng(n)
    return make_random_corpus(rng, n, dated=dated)


def test_sparsify_triangle_example():
    provider = triangle_provider()
    corpus = _corpus_of(3)
    tree = build_max_spanning_tree(provider)
    graph = sparsify(provider, tree, 1.0, ConstraintSet(), corpus)
    edges = {(u, v) for u, v, _ in graph.edges()}
    assert edges == {(0, 1), (1, 0), (1, 2), (2, 1)}
    assert graph.edge_weight(0, 1) == 0.9
    assert not graph.has_edge(0, 2)  # 0.3 < bottleneck 0.8


def test_sparsify_tau_zero_keeps_all_positive_pairs():
    provider = triangle_provider()
    corpus = _corpus_of(3)
    tree = build_max_spanning_tree(provider)
    graph = sparsify(provider, tree, 0.0, ConstraintSet(), corpus)
    assert graph.edge_count == 6


def test_time_directed_keeps_forward_edges_only():
    provider = triangle_provider()
    corpus = _corpus_of(3, dated=True)  # dates strictly increase with index
    tree = build_max_spanning_tree(provider)
    graph = sparsify(provider, tree, 1.0, ConstraintSet(time_directed=True), corpus)
    assert graph.has_edge(0, 1) and not graph.has_edge(1, 0)
    assert graph.has_edge(1, 2) and not graph.has_edge(2, 1)


def test_time_directed_requires_dates():
    provider = triangle_provider()
    corpus = _corpus_of(3, dated=False)
    tree = build_max_spanning_tree(provider)
    with pytest.raises(ValueError, match="has none"):
        sparsify(provider, tree, 1.0, ConstraintSet(time_directed=True), corpus)


def test_edge_mask_restricts_and_validates():
    provider = triangle_provider()
    corpus = _corpus_of(3)
    tree = build_max_spanning_tree(provider)
    mask = edge_mask_from_ids(corpus, [("d0000", "d0001")])
    graph = sparsify(provider, tree, 1.0, ConstraintSet(edge_mask=mask), corpus)
    assert [(u, v) for u, v, _ in graph.edges()] == [(0, 1)]
    with pytest.raises(ValueError, match="unknown id"):
        edge_mask_from_ids(corpus, [("nope", "d0001")])


def test_equal_timestamps_produce_no_edge():
    rng = np.random.default_rng(4)
    corpus = make_random_corpus(rng, 2, dated=True)
    same_day = [
        Document(id=d.id, date=corpus.documents[0].date) for d in corpus.documents
    ]
    corpus = corpus_from_arrays(
        same_day, corpus.embeddings, corpus.projections, corpus.memberships
    )
    provider = MatrixProvider([[1.0, 0.9], [0.9, 1.0]])
    tree = build_max_spanning_tree(provider)
    graph = sparsify(provider, tree, 1.0, ConstraintSet(time_directed=True), corpus)
    assert graph.edge_count == 0


def test_sparsify_monotone_in_tau():
    rng = np.random.default_rng(31)
    corpus = make_random_corpus(rng, 25)
    provider = CoherenceProvider(corpus)
    tree = build_max_spanning_tree(provider)
    previous = None
    for tau in (0.0, 0.5, 1.0, 1.1, 1.5):
        graph = sparsify(provider, tree, tau, ConstraintSet(), corpus)
        edges = {(u, v) for u, v, _ in graph.edges()}
        if previous is not None:
            assert edges <= previous
        previous = edges


def test_connectivity_of_sparse_graph():
    rng = np.random.default_rng(37)
    corpus = make_random_corpus(rng, 30)
    provider = CoherenceProvider(corpus)
    tree = build_max_spanning_tree(provider)
    at_tau = sparsify(provider, tree, 1.0, ConstraintSet(), corpus)
    assert connectivity_report(at_tau).count == 1
    above = sparsify(provider, tree, 1.0 + 1e-6, ConstraintSet(), corpus)
    tree_bottlenecks = [w for _, _, w in tree.edges if w == tree.bottleneck_weight]
    if len(tree_bottlenecks) == 1:
        assert connectivity_report(above).count >= 2
    empty = graph_from_edges(4, [])
    assert connectivity_report(empty).count == 4


def test_raising_tau_past_bottleneck_cuts_the_triangle():
    provider = triangle_provider()
    corpus = _corpus_of(3)
    tree = build_max_spanning_tree(provider)
    above = sparsify(provider, tree, 1.0 + 1e-9, ConstraintSet(), corpus)
    # the 0.8 bottleneck pair is cut; only the 0.9 pair survives
    assert {(u, v) for u, v, _ in above.edges()} == {(0, 1), (1, 0)}
    assert connectivity_report(above).count == 2


def test_closeness_centrality_path_example():
    graph = graph_from_edges(3, [(0, 1, 0.5), (1, 2, 0.5)])
    scores = closeness_centralities(graph)
    assert scores[0] == pytest.approx(2 / 3, abs=1e-12)
    assert scores[1] == pytest.approx(0.5, abs=1e-12)
    assert scores[2] == 0.0
    by_source = centrality_weights(graph, "source")
    assert by_source.edge_weight(0, 1) == pytest.approx(0.5 * 2 / 3, abs=1e-12)
    assert by_source.edge_weight(1, 2) == pytest.approx(0.25, abs=1e-12)
    by_target = centrality_weights(graph, "target")
    # node 2 reaches nothing, so its incoming edge is zeroed and dropped
    assert by_target.edge_weight(1, 2) is None
    assert by_target.edge_weight(0, 1) == pytest.approx(0.25, abs=1e-12)


def test_centrality_not_idempotent():
    graph = graph_from_edges(3, [(0, 1, 0.5), (1, 2, 0.5)])
    once = centrality_weights(graph, "source")
    twice = centrality_weights(once, "source")
    assert twice.edge_weight(0, 1) != once.edge_weight(0, 1)


def test_sparsify_applies_centrality_from_constraints():
    provider = triangle_provider()
    corpus = _corpus_of(3)
    tree = build_max_spanning_tree(provider)
    plain = sparsify(provider, tree, 1.0, ConstraintSet(), corpus)
    scaled = sparsify(
        provider, tree, 1.0, ConstraintSet(centrality_mode="source"), corpus
    )
    scores = closeness_centralities(plain)
    assert scaled.edge_weight(0, 1) == pytest.approx(
        plain.edge_weight(0, 1) * scores[0], abs=1e-12
    )


def test_maxst_edges_survive_at_tau_one():
    rng = np.random.default_rng(41)
    for seed in range(5):
        corpus = make_random_corpus(np.random.default_rng(seed), 20)
        provider = CoherenceProvider(corpus)
        tree = build_max_spanning_tree(provider)
        graph = sparsify(provider, tree, 1.0, ConstraintSet(), corpus)
        for u, v, w in tree.edges:
            assert graph.has_edge(u, v) and graph.has_edge(v, u)


def test_graph_cache_roundtrip(tmp_path):
    rng = np.random.default_rng(43)
    corpus = make_random_corpus(rng, 15, dated=True)
    provider = CoherenceProvider(corpus)
    tree = build_max_spanning_tree(provider)
    graph = sparsify(
        provider, tree, 1.0,
        ConstraintSet(time_directed=True, centrality_mode="source"), corpus,
    )
    path = tmp_path / "graph.ntg"
    save_graph(path, graph)
    back = load_graph(path)
    assert back.n == graph.n
    assert back.tau == graph.tau
    assert back.omega == graph.omega
    assert back.constraints.time_directed
    assert back.constraints.centrality_mode == "source"
    assert list(back.edges()) == list(graph.edges())  # exact float round-trip
    save_graph(tmp_path / "again.ntg", back)
    assert (tmp_path / "again.ntg").read_bytes() == path.read_bytes()


def test_cache_header_shape(tmp_path):
    graph = graph_from_edges(2, [(0, 1, 0.125)], tau=1.0, omega=0.125)
    path = tmp_path / "g.ntg"
    save_graph(path, graph)
    lines = path.read_text().splitlines()
    assert lines[0] == "ntgraph 1 2 1 0.125 none"
    assert lines[1] == "0\t1\t0.125"


def test_pollack_property_small_graphs():
    """Bottleneck of the unique tree path equals the brute-force widest
    bottleneck in the original graph, for all pairs."""
    from conftest import all_simple_path_bottlenecks, random_connected_undirected_weights

    rng = np.random.default_rng(47)
    for _ in range(20):
        n = int(rng.integers(4, 9))
        weights = random_connected_undirected_weights(rng, n, 0.5)
        tree = max_spanning_tree_of_matrix(weights)
        adj = [
            [(v, weights[u, v]) for v in range(n) if v != u and weights[u, v] > -np.inf]
            for u in range(n)
        ]
        for s in range(n):
            for t in range(s + 1, n):
                oracle = all_simple_path_bottlenecks(adj, s, t)
                assert tree.path_bottleneck(s, t) == oracle
