import numpy as np
import pytest
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import jensenshannon, squareform

import helpers
from rescap.taxonomy import (
    ClusterAssignment,
    Dendrogram,
    cut_tree,
    js_distance,
    topic_distance_matrix,
    ward_cluster,
)
from rescap.topics.state import TopicModelState


def test_js_distance_extremes():
    assert js_distance([0.2, 0.8], [0.2, 0.8]) == 0.0
    assert js_distance([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0, abs=1e-12)


def test_js_distance_hand_value():
    # m = [.75, .25]; jsd = 0.5*KL(p||m) + 0.5*KL(q||m) resolved by hand
    want = np.sqrt(0.5 * np.log2(4 / 3) + 0.25 - 0.25 * np.log2(1.5))
    assert js_distance([1.0, 0.0], [0.5, 0.5]) == pytest.approx(want, abs=1e-12)


def test_js_distance_matches_scipy(rng):
    for _ in range(50):
        dim = int(rng.integers(2, 40))
        p = rng.dirichlet(np.full(dim, 0.4))
        q = rng.dirichlet(np.full(dim, 0.4))
        assert js_distance(p, q) == pytest.approx(
            jensenshannon(p, q, base=2), abs=1e-12
        )


def test_js_distance_metric_properties(rng):
    draws = rng.dirichlet(np.full(6, 0.5), size=30)
    for _ in range(100):
        i, j, k = rng.integers(0, 30, size=3)
        dij = js_distance(draws[i], draws[j])
        dji = js_distance(draws[j], draws[i])
        assert dij == pytest.approx(dji, abs=1e-12)
        assert dij <= js_distance(draws[i], draws[k]) + js_distance(draws[k], draws[j]) + 1e-12
    assert js_distance(draws[0], draws[0]) == 0.0


def test_js_distance_validation():
    with pytest.raises(ValueError, match="mismatch"):
        js_distance([0.5, 0.5], [0.2, 0.3, 0.5])
    with pytest.raises(ValueError):
        js_distance([0.7, 0.7], [0.5, 0.5])


def test_topic_distance_matrix():
    state = TopicModelState(
        k=3,
        epochs=np.array([2000, 2001]),
        alpha=np.full((2, 3), 1.0),
        beta=np.stack(
            [
                np.array([[0.7, 0.2, 0.1], [0.1, 0.8, 0.1], [0.3, 0.3, 0.4]]),
                np.array([[1 / 3, 1 / 3, 1 / 3]] * 3),
            ]
        ),
        doc_ids=["d"],
        doc_theta=np.array([[1.0, 0.0, 0.0]]),
        doc_years=np.array([2000]),
    )
    d = topic_distance_matrix(state, epoch=2000)
    assert d.shape == (3, 3)
    np.testing.assert_array_equal(np.diag(d), 0.0)
    np.testing.assert_allclose(d, d.T)
    assert d[0, 1] == pytest.approx(js_distance(state.beta[0, 0], state.beta[0, 1]))
    # last epoch is the default; identical rows give an all-zero matrix
    np.testing.assert_allclose(topic_distance_matrix(state), 0.0)


def test_ward_d_hand_case():
    d = np.array(
        [
            [0.0, 1.0, 4.0],
            [1.0, 0.0, 5.0],
            [4.0, 5.0, 0.0],
        ]
    )
    dendro = ward_cluster(d, variant="ward.D")
    assert dendro.n_leaves == 3
    (a0, b0, h0), (a1, b1, h1) = dendro.merges
    assert (a0, b0) == (0, 1)
    assert h0 == pytest.approx(1.0)
    # Lance-Williams: ((1+1)*4 + (1+1)*5 - 1*1) / 3
    assert (a1, b1) == (3, 2)
    assert h1 == pytest.approx(17 / 3)


def test_ward_matches_reference_implementation(rng):
    for variant, squared in (("ward.D", False), ("ward.D2", True)):
        for _ in range(20):
            k = int(rng.integers(3, 9))
            points = rng.normal(size=(k, 3))
            d = np.abs(points[:, None, :] - points[None, :, :]).sum(axis=2)
            np.fill_diagonal(d, 0.0)
            got = ward_cluster(d, variant=variant)
            want = helpers.reference_ward(d, squared=squared)
            assert len(got.merges) == len(want)
            for (ga, gb, gh), (wa, wb, wh) in zip(got.merges, want):
                assert {ga, gb} == {wa, wb}
                assert gh == pytest.approx(wh, rel=1e-9)


def test_ward_d2_matches_scipy_linkage(rng):
    for _ in range(10):
        k = int(rng.integers(4, 10))
        points = rng.normal(size=(k, 4))
        condensed = np.sqrt(
            ((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2)
        )
        np.fill_diagonal(condensed, 0.0)
        dendro = ward_cluster(condensed, variant="ward.D2")
        z = linkage(squareform(condensed, checks=False), method="ward")
        np.testing.assert_allclose(sorted(dendro.heights()), sorted(z[:, 2]), rtol=1e-9)
        for n_clusters in (2, 3):
            ours = cut_tree(dendro, n_clusters).as_array()
            theirs = fcluster(z, t=n_clusters, criterion="maxclust")
            # same partition up to relabeling
            pairs = {(a, b) for a, b in zip(ours, theirs)}
            assert len(pairs) == n_clusters


def test_ward_heights_monotone(rng):
    for _ in range(25):
        k = int(rng.integers(3, 12))
        m = rng.uniform(0.1, 2.0, size=(k, k))
        d = (m + m.T) / 2
        np.fill_diagonal(d, 0.0)
        for variant in ("ward.D", "ward.D2"):
            heights = ward_cluster(d, variant=variant).heights()
            assert np.all(np.diff(heights) >= -1e-12)


def test_ward_tie_break_prefers_smallest_leaves():
    d = np.ones((4, 4)) - np.eye(4)
    dendro = ward_cluster(d)
    assert dendro.merges[0][:2] == (0, 1)
    # every remaining pair ties at distance 1; the winner is the pair
    # holding leaf 0, which now lives inside merged node 4
    assert dendro.merges[1][:2] == (4, 2)


def test_ward_validation():
    with pytest.raises(ValueError, match="variant"):
        ward_cluster(np.zeros((2, 2)), variant="average")
    with pytest.raises(ValueError, match="symmetric"):
        ward_cluster(np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_cut_tree_cluster_ids_ordered_by_smallest_leaf():
    d = np.array(
        [
            [0.0, 0.1, 3.0, 3.0],
            [0.1, 0.0, 3.0, 3.0],
            [3.0, 3.0, 0.0, 0.2],
            [3.0, 3.0, 0.2, 0.0],
        ]
    )
    dendro = ward_cluster(d)
    cut = cut_tree(dendro, 2)
    assert cut.assignment == {0: 0, 1: 0, 2: 1, 3: 1}
    assert cut.topics_in(0) == [0, 1]
    assert cut.topics_in(1) == [2, 3]
    np.testing.assert_array_equal(cut.as_array(), [0, 0, 1, 1])
    assert cut_tree(dendro, 1).n_clusters == 1
    assert cut_tree(dendro, 4).assignment == {0: 0, 1: 1, 2: 2, 3: 3}
    with pytest.raises(ValueError, match="n_clusters"):
        cut_tree(dendro, 5)
    with pytest.raises(ValueError, match="n_clusters"):
        cut_tree(dendro, 0)


def test_newick_output_parses():
    dendro = ward_cluster(
        np.array(
            [
                [0.0, 0.1, 3.0, 3.0],
                [0.1, 0.0, 3.0, 3.0],
                [3.0, 3.0, 0.0, 0.2],
                [3.0, 3.0, 0.2, 0.0],
            ]
        )
    )
    text = dendro.to_newick(["a", "b", "c", "d"])
    assert text.endswith(";")
    assert text.count("(") == text.count(")") == 3
    for name in "abcd":
        assert f"{name}:" in text
    # leaf branch lengths recover the first merge height
    assert "a:0.1" in text and "b:0.1" in text


def test_newick_trivial_trees():
    assert Dendrogram(n_leaves=1, merges=[]).to_newick(["only"]) == "only;"


def test_merge_json_roundtrip():
    import json

    dendro = Dendrogram(n_leaves=3, merges=[(0, 1, 0.5), (3, 2, 1.25)])
    payload = json.loads(dendro.to_merge_json())
    assert payload == {"n_leaves": 3, "merges": [[0, 1, 0.5], [3, 2, 1.25]]}


def test_cluster_assignment_labels():
    cut = ClusterAssignment(assignment={0: 0, 1: 1}, n_clusters=2, labels={0: "optics"})
    assert cut.labels[0] == "optics"
    assert cut.topics_in(1) == [1]
