import itertools

import numpy as np
import pytest

from imvclust.clustering import _lloyd, cluster_graph, kmeans, spectral_embed


def block_graph(sizes, within=1.0, between=0.0, noise=0.0, seed=0):
    n = sum(sizes)
    h = np.full((n, n), between)
    start = 0
    for s in sizes:
        h[start : start + s, start : start + s] = within
        start += s
    if noise:
        rng = np.random.default_rng(seed)
        sym = rng.normal(size=(n, n)) * noise
        h = np.abs(h + (sym + sym.T) / 2)
    return (h + h.T) / 2


class TestSpectralEmbed:
    def test_block_diagonal_recovery(self):
        h = block_graph([4, 3, 5])
        emb = spectral_embed(h, 3)
        labels = kmeans(emb.y, 3, restarts=5, seed=0)
        # all rows within a block identical
        start = 0
        for s in [4, 3, 5]:
            block = emb.y[start : start + s]
            assert np.abs(block - block[0]).max() < 1e-8
            assert len(set(labels[start : start + s])) == 1
            start += s
        assert len(set(labels.tolist())) == 3

    def test_identity_graph_degenerate(self):
        emb = spectral_embed(np.eye(6), 2)
        assert emb.degenerate
        np.testing.assert_allclose(emb.eigenvalues, np.ones(2), atol=1e-12)
        # nonzero rows normalized; zero rows may remain for basis vectors
        rows = np.linalg.norm(emb.y, axis=1)
        assert np.all((rows < 1e-12) | (np.abs(rows - 1) < 1e-12))

    def test_matches_dense_eigensolver_oracle(self):
        rng = np.random.default_rng(3)
        a = rng.random((8, 8))
        h = a @ a.T  # symmetric PSD
        emb = spectral_embed(h, 2)
        d = h.sum(axis=1)
        norm = h / np.sqrt(np.outer(d, d))
        vals, vecs = np.linalg.eigh(norm)
        np.testing.assert_allclose(emb.eigenvalues, vals[::-1][:2], atol=1e-8)
        # compare subspaces via row-normalized Grams (sign/rotation free)
        oracle = vecs[:, -2:]
        oracle = oracle / np.linalg.norm(oracle, axis=1, keepdims=True)
        np.testing.assert_allclose(emb.y @ emb.y.T, oracle @ oracle.T, atol=1e-8)

    def test_isolated_vertices_flagged(self):
        h = block_graph([3, 3])
        h[2, :] = 0.0
        h[:, 2] = 0.0
        emb = spectral_embed(h, 2)
        assert emb.isolated == 1

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(4)
        h = block_graph([4, 4], noise=0.05, seed=1)
        perm = rng.permutation(8)
        p = np.eye(8)[perm]
        emb = spectral_embed(h, 2)
        emb_p = spectral_embed(p @ h @ p.T, 2)
        gram = emb.y @ emb.y.T
        gram_p = emb_p.y @ emb_p.y.T
        np.testing.assert_allclose(gram_p, p @ gram @ p.T, atol=1e-8)

    def test_scale_invariance(self):
        h = block_graph([4, 3], noise=0.1, seed=2)
        emb1 = spectral_embed(h, 2)
        emb2 = spectral_embed(37.5 * h, 2)
        np.testing.assert_allclose(np.abs(emb1.y), np.abs(emb2.y), atol=1e-8)
        l1 = kmeans(emb1.y, 2, restarts=5, seed=3)
        l2 = kmeans(emb2.y, 2, restarts=5, seed=3)
        np.testing.assert_array_equal(l1, l2)

    def test_cluster_count_bounds(self):
        with pytest.raises(ValueError):
            spectral_embed(np.eye(4), 5)
        with pytest.raises(ValueError):
            spectral_embed(np.eye(4), 1)


class TestKMeans:
    def test_separated_groups_exact(self):
        rng = np.random.default_rng(5)
        y = np.vstack([rng.normal(size=(10, 2)) * 0.05 + c for c in ([0, 0], [5, 5], [-5, 5])])
        labels = kmeans(y, 3, restarts=5, seed=0)
        truth = np.repeat([0, 1, 2], 10)
        # same partition up to relabeling
        for g in range(3):
            assert len(set(labels[truth == g].tolist())) == 1
        assert len(set(labels.tolist())) == 3

    def test_identical_points(self):
        y = np.ones((7, 3))
        labels = kmeans(y, 2, restarts=3, seed=0)
        # zero inertia; the non-empty cluster holds everything that matters
        assert labels.shape == (7,)

    def test_one_dimensional_brute_force(self):
        rng = np.random.default_rng(6)
        for trial in range(10):
            y = np.sort(rng.normal(size=(6, 1)), axis=0)
            labels = kmeans(y, 2, restarts=10, seed=trial)
            inertia = sum(
                ((y[labels == j] - y[labels == j].mean(axis=0)) ** 2).sum() for j in range(2)
            )
            best = np.inf
            for assign in itertools.product([0, 1], repeat=6):
                assign = np.array(assign)
                if len(set(assign.tolist())) < 2:
                    continue
                val = sum(
                    ((y[assign == j] - y[assign == j].mean(axis=0)) ** 2).sum() for j in range(2)
                )
                best = min(best, val)
            assert inertia == pytest.approx(best, abs=1e-12)

    def test_deterministic(self):
        rng = np.random.default_rng(7)
        y = rng.normal(size=(20, 3))
        a = kmeans(y, 4, restarts=8, seed=42)
        b = kmeans(y, 4, restarts=8, seed=42)
        np.testing.assert_array_equal(a, b)

    def test_inertia_non_increasing_within_lloyd(self):
        rng = np.random.default_rng(8)
        y = rng.normal(size=(30, 2))
        centers = y[rng.choice(30, 3, replace=False)].copy()
        _, _, history = _lloyd(y, centers)
        assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))

    def test_too_many_clusters(self):
        with pytest.raises(ValueError):
            kmeans(np.zeros((3, 2)), 4, restarts=1, seed=0)
        with pytest.raises(ValueError):
            kmeans(np.zeros((3, 2)), 2, restarts=0, seed=0)


class TestClusterGraph:
    def test_end_to_end_blocks(self):
        h = block_graph([5, 5, 5], noise=0.02, seed=9)
        labels = cluster_graph(h, 3, restarts=5, seed=1)
        truth = np.repeat([0, 1, 2], 5)
        for g in range(3):
            assert len(set(labels[truth == g].tolist())) == 1
