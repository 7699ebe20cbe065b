import numpy as np
import pytest

from rescap.collaboration import (
    CollaborationTensor,
    build_collab_tensor,
    paper_collab_matrix,
)
from rescap.corpus import CountryCredit
from rescap.taxonomy import ClusterAssignment


def _cluster_map():
    return ClusterAssignment(assignment={0: 0, 1: 1}, n_clusters=2)


def test_paper_collab_matrix_frozen():
    credit = CountryCredit("p", {"US": 0.6, "KR": 0.4})
    matrix = paper_collab_matrix(credit, ["KR", "US"])
    np.testing.assert_allclose(matrix, [[0.16, 0.24], [0.24, 0.36]])


def test_paper_collab_matrix_unknown_country():
    with pytest.raises(ValueError, match="JP"):
        paper_collab_matrix(CountryCredit("p", {"JP": 1.0}), ["US", "KR"])


def test_paper_collab_matrix_properties(rng):
    codes = ["A", "B", "C", "D"]
    for _ in range(50):
        k = int(rng.integers(1, 5))
        chosen = list(rng.choice(codes, size=k, replace=False))
        shares = rng.dirichlet(np.full(k, 1.0))
        credit = CountryCredit("p", dict(zip(chosen, shares)))
        matrix = paper_collab_matrix(credit, codes)
        np.testing.assert_allclose(matrix, matrix.T, atol=1e-15)
        # total mass of the outer product is (sum of credits)^2 = 1
        assert matrix.sum() == pytest.approx(1.0)
        assert np.all(matrix >= 0)


def test_build_collab_tensor_hand_case():
    credits = [
        CountryCredit("p0", {"US": 0.6, "KR": 0.4}),
        CountryCredit("p1", {"US": 1.0}),
    ]
    thetas = [np.array([0.75, 0.25]), np.array([0.5, 0.5])]
    tensor = build_collab_tensor(["p0", "p1"], [2000, 2000], credits, thetas, _cluster_map())
    assert tensor.countries == ["KR", "US"]
    np.testing.assert_array_equal(tensor.years, [2000])
    # cluster 0: 0.75 * outer(p0) + 0.5 * outer(p1)
    np.testing.assert_allclose(
        tensor.values[0, 0],
        0.75 * np.array([[0.16, 0.24], [0.24, 0.36]]) + 0.5 * np.array([[0, 0], [0, 1.0]]),
    )
    np.testing.assert_allclose(
        tensor.values[0, 1],
        0.25 * np.array([[0.16, 0.24], [0.24, 0.36]]) + 0.5 * np.array([[0, 0], [0, 1.0]]),
    )
    assert tensor.pair_weight(2000, 0, "US", "KR") == pytest.approx(0.18)
    assert tensor.pair_weight(2000, 0, "KR", "US") == pytest.approx(0.18)


def test_build_collab_tensor_mass_conservation(rng):
    codes = ["A", "B", "C"]
    doc_ids, years, credits, thetas = [], [], [], []
    for i in range(30):
        k = int(rng.integers(1, 4))
        chosen = list(rng.choice(codes, size=k, replace=False))
        shares = rng.dirichlet(np.full(k, 1.0))
        doc_ids.append(f"p{i}")
        years.append(int(rng.integers(2000, 2003)))
        credits.append(CountryCredit(f"p{i}", dict(zip(chosen, shares))))
        thetas.append(rng.dirichlet([1.0, 1.0]))
    tensor = build_collab_tensor(doc_ids, years, credits, thetas, _cluster_map())
    # summing each paper's contribution over clusters and both country
    # axes gives (sum credits)^2 = 1, so the tensor total is the corpus size
    assert tensor.values.sum() == pytest.approx(30.0)
    np.testing.assert_allclose(
        tensor.values, np.swapaxes(tensor.values, 2, 3), atol=1e-15
    )


def test_build_collab_tensor_validation():
    credit = CountryCredit("p0", {"US": 1.0})
    with pytest.raises(ValueError, match="p0 has no country credit"):
        build_collab_tensor(["p0"], [2000], [None], [np.array([1.0, 0.0])], _cluster_map())
    with pytest.raises(ValueError, match="p0 has no topic mixture"):
        build_collab_tensor(["p0"], [2000], [credit], [None], _cluster_map())
    with pytest.raises(ValueError, match="sum to"):
        build_collab_tensor(["p0"], [2000], [credit], [np.array([0.7, 0.6])], _cluster_map())
    with pytest.raises(ValueError, match="p0: topic mixture"):
        build_collab_tensor(["p0"], [2000], [credit], [np.array([1.0])], _cluster_map())
    with pytest.raises(ValueError, match="align"):
        build_collab_tensor(["p0", "p1"], [2000], [credit], [np.array([1.0, 0.0])], _cluster_map())
    with pytest.raises(ValueError, match="no papers"):
        build_collab_tensor([], [], [], [], _cluster_map())


def test_tensor_lookups_and_iter_pairs():
    values = np.zeros((1, 1, 3, 3))
    values[0, 0] = [[0.0, 0.5, 0.0], [0.5, 0.0, 0.25], [0.0, 0.25, 0.0]]
    tensor = CollaborationTensor(
        years=np.array([2000]), countries=["A", "B", "C"], values=values
    )
    pairs = list(tensor.iter_pairs())
    assert pairs == [
        (2000, 0, "A", "B", 0.5),
        (2000, 0, "A", "C", 0.0),
        (2000, 0, "B", "C", 0.25),
    ]
    with pytest.raises(ValueError, match="diagonal"):
        tensor.pair_weight(2000, 0, "A", "A")
    with pytest.raises(KeyError, match="1999"):
        tensor.pair_weight(1999, 0, "A", "B")
    with pytest.raises(KeyError, match="ZZ"):
        tensor.country_index("ZZ")
