import numpy as np
import pytest

from signed_spectra import (
    ClusterConfig,
    DirectedSignedGraph,
    SynSpec,
    accuracy,
    cluster_graph,
    evaluate_candidate,
    generate,
    top_eigenpairs,
)
from signed_spectra.cluster import cluster_embedding
from signed_spectra.embedding import normalize_rows, split_complex
from signed_spectra.perturb import random_block


def disconnected_blocks(sizes, density, seed):
    rng = np.random.default_rng(seed)
    n = sum(sizes)
    a = np.zeros((n, n))
    lo = 0
    for s in sizes:
        a[lo:lo + s, lo:lo + s] = random_block(s, density, rng)
        lo += s
    labels = np.repeat(np.arange(len(sizes)), sizes)
    return DirectedSignedGraph.from_dense(a), labels


class TestDisconnectedRecovery:
    def test_five_blocks_alpha_one(self):
        g, truth = disconnected_blocks([30, 25, 20, 15, 10], 0.5, seed=0)
        res, trace = cluster_graph(g, ClusterConfig(tau=g.n, alpha=1.0, seed=0))
        assert res.k == 5
        assert accuracy(res.labels, truth) == 1.0
        assert len(trace.initial_basis) == 5
        assert trace.accepted == []

    def test_recovery_across_seeds(self):
        for seed in range(3):
            g, truth = disconnected_blocks([20, 16, 12], 0.55, seed=seed)
            res, _ = cluster_graph(g, ClusterConfig(tau=g.n, alpha=1.0, seed=seed))
            assert res.k == 3
            assert accuracy(res.labels, truth) == 1.0

    def test_angles_orthogonal_for_disconnected(self):
        g, truth = disconnected_blocks([20, 16, 12], 0.55, seed=1)
        res, _ = cluster_graph(g, ClusterConfig(tau=g.n, alpha=1.0, seed=1))
        assert res.avg_angle == pytest.approx(90.0, abs=1e-6)


class TestSmallSyntheticFamily:
    def test_negative_inter_blocks_recovered(self):
        # all inter-cluster edges negative; the screen finds the uniform
        # combination vector and the loop builds the remaining clusters
        spec = SynSpec((180, 160, 140), 0.5, 0.0, 0.0, 0.2, seed=2)
        g, truth = generate(spec)
        res, _ = cluster_graph(g, ClusterConfig(tau=50, alpha=1.0, seed=2))
        assert res.k == 3
        assert accuracy(res.labels, truth) == 1.0

    def test_positive_inter_blocks_recovered(self):
        spec = SynSpec((60, 50, 40), 0.5, 0.0, 0.1, 0.0, seed=3)
        g, truth = generate(spec)
        res, _ = cluster_graph(g, ClusterConfig(tau=min(50, g.n), alpha=1.0, seed=3))
        assert res.k == 3
        assert accuracy(res.labels, truth) == 1.0

    def test_single_tight_cluster_stays_one(self):
        # complete digraph: every split has strictly negative modularity,
        # so no candidate is ever accepted
        n = 20
        g = DirectedSignedGraph.from_dense(np.ones((n, n)) - np.eye(n))
        for seed in range(3):
            res, trace = cluster_graph(g, ClusterConfig(tau=n, alpha=1.0, seed=seed))
            assert res.k == 1
            assert res.dbi is None and res.avg_angle is None
            assert not trace.fallback_single_cluster

    def test_fallback_when_no_uniform_vector(self):
        # pure rotation block: spectrum is {i, -i}, no real eigenvector
        g = DirectedSignedGraph.from_dense([[0, 1], [-1, 0]])
        res, trace = cluster_graph(g, ClusterConfig(tau=2, alpha=1.0, seed=0))
        assert trace.fallback_single_cluster
        assert res.k == 1
        assert np.array_equal(res.labels, [0, 0])


class TestTraceInvariants:
    def test_path_length_counts_acceptances(self):
        g, _ = disconnected_blocks([16, 12, 10], 0.55, seed=5)
        _, trace = cluster_graph(g, ClusterConfig(tau=g.n, alpha=1.0, seed=5))
        assert len(trace.modularity_path) == len(trace.accepted) + 1

    def test_monotone_path_at_alpha_one_with_nonnegative_scores(self):
        spec = SynSpec((18, 14, 12), 0.55, 0.0, 0.1, 0.05, seed=6)
        g, _ = generate(spec)
        _, trace = cluster_graph(g, ClusterConfig(tau=min(40, g.n), alpha=1.0, seed=6))
        path = trace.modularity_path
        for prev, nxt in zip(path, path[1:]):
            if prev >= 0:
                assert nxt >= prev

    def test_deterministic_rerun(self):
        spec = SynSpec((15, 12, 10), 0.5, 0.05, 0.1, 0.05, seed=7)
        g, _ = generate(spec)
        cfg = ClusterConfig(tau=min(30, g.n), alpha=0.95, seed=7)
        res1, tr1 = cluster_graph(g, cfg)
        res2, tr2 = cluster_graph(g, cfg)
        assert np.array_equal(res1.labels, res2.labels)
        assert res1.modularity == res2.modularity
        assert tr1.to_json() == tr2.to_json()

    def test_candidate_order_is_descending_modulus(self):
        g, _ = disconnected_blocks([16, 12], 0.5, seed=8)
        eig = top_eigenpairs(g, g.n, seed=8)
        _, trace = cluster_graph(g, ClusterConfig(tau=g.n, alpha=1.0, seed=8))
        mods = [abs(eig.pairs[i].value) for i in trace.candidate_order]
        assert all(a >= b - 1e-12 for a, b in zip(mods, mods[1:]))


class TestEvaluateCandidate:
    def test_baseline_two_perron_vectors(self):
        g, truth = disconnected_blocks([14, 11], 0.55, seed=9)
        cfg = ClusterConfig(tau=g.n, alpha=1.0, seed=9)
        eig = top_eigenpairs(g, g.n, seed=9)
        labels, q, inertia = evaluate_candidate(eig, [0, 1], None, g, cfg)
        assert accuracy(labels, truth) == 1.0
        assert q > 0

    def test_complex_candidate_adds_two_columns_one_cluster(self):
        # one positive block plus a pure-rotation 2-node block: the graph is
        # disconnected; its spectrum holds a complex pair from the rotation
        a = np.zeros((10, 10))
        rng = np.random.default_rng(10)
        a[:8, :8] = random_block(8, 0.6, rng)
        a[8, 9], a[9, 8] = 1.0, -1.0
        g = DirectedSignedGraph.from_dense(a)
        eig = top_eigenpairs(g, 4, seed=0)
        complex_idx = next(i for i, p in enumerate(eig.pairs) if not p.is_real)
        real_idx = next(i for i, p in enumerate(eig.pairs) if p.is_real)
        emb = split_complex(eig, [real_idx, complex_idx])
        assert emb.d == 3  # one real column + re/im pair
        cfg = ClusterConfig(tau=4, alpha=1.0, seed=0)
        labels, q, _ = evaluate_candidate(eig, [real_idx], complex_idx, g, cfg)
        assert len(np.unique(labels)) == 2  # k = |basis| + 1

    def test_rejected_candidate_leaves_state_unchanged(self):
        g, truth = disconnected_blocks([16, 12, 10], 0.55, seed=11)
        res, trace = cluster_graph(g, ClusterConfig(tau=g.n, alpha=1.0, seed=11))
        assert trace.accepted == []
        assert sorted(trace.initial_basis) == [0, 1, 2]
        assert res.k == 3


class TestZeroRowHandling:
    def test_zero_rows_join_nearest_centroid(self):
        coords = np.array([
            [1.0, 0.0], [0.9, 0.1], [0.0, 1.0], [0.1, 0.9], [0.0, 0.0],
        ])
        from signed_spectra.embedding import SpectralEmbedding, ColumnOrigin
        emb = SpectralEmbedding(
            coords=coords,
            column_origin=(ColumnOrigin(0, "real"), ColumnOrigin(1, "real")),
            zero_rows=frozenset({4}),
        )
        labels, inertia = cluster_embedding(emb, 2, seed=0)
        assert labels[4] in (labels[0], labels[2])
        assert len(np.unique(labels[:4])) == 2
