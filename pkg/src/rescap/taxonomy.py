"""Topic taxonomy: Jensen-Shannon distances, ward agglomeration, tree cuts.

Topics are compared through the word distributions of a chosen epoch
(by default the last one). The pairwise Jensen-Shannon distance matrix
is agglomerated with the classic ward recurrence applied to the raw,
unsquared dissimilarities ("ward.D"); cutting the resulting tree yields
the topical clusters. Cluster naming stays a human task via a labels
file mapping cluster id to name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from rescap.validation import check_distance_matrix, check_simplex


def js_distance(p, q) -> float:
    """Jensen-Shannon distance: the square root of the JS divergence.

    Base-2 logarithms bound the value in [0, 1]; it is 0 exactly when
    the distributions coincide and 1 for disjoint supports.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    check_simplex(p, name="p")
    check_simplex(q, name="q")
    m = 0.5 * (p + q)
    divergence = 0.5 * (_kl2(p, m) + _kl2(q, m))
    return float(np.sqrt(max(divergence, 0.0)))


def _kl2(p, m):
    mask = p > 0
    return float(np.sum(p[mask] * np.log2(p[mask] / m[mask])))


def topic_distance_matrix(state, epoch=None) -> np.ndarray:
    """Pairwise JS distances between topic word rows at one epoch."""
    t = state.epoch_index(epoch)
    beta = state.beta[t]
    k = beta.shape[0]
    out = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            out[i, j] = out[j, i] = js_distance(beta[i], beta[j])
    return out


@dataclass
class Dendrogram:
    """Agglomeration result: K leaves and K-1 ordered merges.

    Nodes 0..K-1 are leaves; merge m creates node K+m. Each merge is
    (left_node, right_node, height) with heights non-decreasing.
    """

    n_leaves: int
    merges: list[tuple[int, int, float]]
    labels: Optional[dict[int, str]] = None

    def heights(self) -> np.ndarray:
        return np.array([h for _, _, h in self.merges])

    def to_merge_json(self) -> str:
        return json.dumps(
            {
                "n_leaves": self.n_leaves,
                "merges": [[int(a), int(b), float(h)] for a, b, h in self.merges],
            },
            indent=2,
        )

    def to_newick(self, leaf_names=None) -> str:
        """Newick text with branch lengths from merge-height differences."""
        if leaf_names is None:
            leaf_names = [str(i) for i in range(self.n_leaves)]
        node_height = {i: 0.0 for i in range(self.n_leaves)}
        children = {}
        node = self.n_leaves
        for left, right, height in self.merges:
            children[node] = (left, right)
            node_height[node] = height
            node += 1

        def render(node_id, parent_height):
            length = parent_height - node_height[node_id]
            if node_id < self.n_leaves:
                return f"{leaf_names[node_id]}:{length:.8g}"
            left, right = children[node_id]
            inner = f"({render(left, node_height[node_id])},{render(right, node_height[node_id])})"
            return f"{inner}:{length:.8g}"

        if not self.merges:
            return f"{leaf_names[0]};" if self.n_leaves == 1 else ";"
        root = self.n_leaves + len(self.merges) - 1
        left, right = children[root]
        h = node_height[root]
        return f"({render(left, h)},{render(right, h)});"


@dataclass
class ClusterAssignment:
    """Topic -> cluster map with contiguous cluster ids from 0."""

    assignment: dict[int, int]
    n_clusters: int
    labels: dict[int, str] = field(default_factory=dict)

    def topics_in(self, cluster: int) -> list[int]:
        return sorted(t for t, c in self.assignment.items() if c == cluster)

    def as_array(self) -> np.ndarray:
        return np.array([self.assignment[t] for t in range(len(self.assignment))], dtype=np.int64)


def ward_cluster(distance_matrix, variant: str = "ward.D") -> Dendrogram:
    """Agglomerate a distance matrix with the ward recurrence.

    "ward.D" applies the Lance-Williams update to the dissimilarities as
    given; "ward.D2" applies it to their squares and reports square-root
    heights. Ties on merge distance break deterministically toward the
    pair containing the smallest leaf index.
    """
    d = check_distance_matrix(distance_matrix).copy()
    if variant not in ("ward.D", "ward.D2"):
        raise ValueError(f"unknown ward variant: {variant}")
    squared = variant == "ward.D2"
    if squared:
        d = d**2

    k = d.shape[0]
    active = list(range(k))
    node_of = {i: i for i in range(k)}
    min_leaf = {i: i for i in range(k)}
    size = {i: 1 for i in range(k)}
    merges: list[tuple[int, int, float]] = []
    next_node = k

    for _ in range(k - 1):
        best = None
        for ai in range(len(active)):
            for bi in range(ai + 1, len(active)):
                a, b = active[ai], active[bi]
                lo, hi = sorted((min_leaf[a], min_leaf[b]))
                key = (d[a, b], lo, hi)
                if best is None or key < best[0]:
                    best = (key, a, b)
        (dist, _, _), a, b = best
        if min_leaf[b] < min_leaf[a]:
            a, b = b, a

        height = float(np.sqrt(dist)) if squared else float(dist)
        merges.append((node_of[a], node_of[b], height))

        na, nb = size[a], size[b]
        for c in active:
            if c in (a, b):
                continue
            nc = size[c]
            updated = ((na + nc) * d[a, c] + (nb + nc) * d[b, c] - nc * d[a, b]) / (na + nb + nc)
            d[a, c] = d[c, a] = updated
        size[a] = na + nb
        node_of[a] = next_node
        min_leaf[a] = min(min_leaf[a], min_leaf[b])
        next_node += 1
        active.remove(b)

    return Dendrogram(n_leaves=k, merges=merges)


def cut_tree(dendrogram: Dendrogram, n_clusters: int) -> ClusterAssignment:
    """Cut the tree by removing the n_clusters-1 highest merges.

    Heights are non-decreasing in merge order, so this keeps the first
    K - n_clusters merges; the connected leaf groups become clusters,
    numbered contiguously by their smallest leaf index.
    """
    k = dendrogram.n_leaves
    if not 1 <= n_clusters <= k:
        raise ValueError(f"n_clusters must be in [1, {k}], got {n_clusters}")

    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    members = {i: [i] for i in range(k)}
    node_root = {i: i for i in range(k)}
    node = k
    for left, right, _ in dendrogram.merges[: k - n_clusters]:
        ra, rb = find(node_root[left]), find(node_root[right])
        parent[rb] = ra
        members[ra].extend(members.pop(rb))
        node_root[node] = ra
        node += 1

    groups = sorted(members.values(), key=min)
    assignment = {}
    for cluster_id, group in enumerate(groups):
        for leaf in group:
            assignment[leaf] = cluster_id
    return ClusterAssignment(assignment=assignment, n_clusters=n_clusters)
