"""International collaboration tensors from fractional country credits.

Each paper contributes the outer product of its country credit vector,
split across topical clusters by its topic mixture. Accumulated over a
corpus this yields a year x cluster x country x country tensor whose
off-diagonal entries measure pairwise collaboration strength and whose
diagonal holds within-country credit mass (kept for bookkeeping, left
out of pair statistics).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from rescap.corpus import CountryCredit
from rescap.taxonomy import ClusterAssignment

CREDIT_SUM_TOL = 1e-9


@dataclass
class CollaborationTensor:
    """Symmetric collaboration weights indexed (year, cluster, m, n)."""

    years: np.ndarray
    countries: list[str]
    values: np.ndarray

    @property
    def n_clusters(self) -> int:
        return self.values.shape[1]

    def country_index(self, country: str) -> int:
        try:
            return self.countries.index(country)
        except ValueError:
            raise KeyError(f"unknown country: {country}") from None

    def year_index(self, year: int) -> int:
        pos = np.flatnonzero(self.years == year)
        if pos.size == 0:
            raise KeyError(f"unknown year: {year}")
        return int(pos[0])

    def pair_weight(self, year: int, cluster: int, m: str, n: str) -> float:
        """Collaboration weight of an unordered country pair."""
        if m == n:
            raise ValueError("pair statistics exclude the diagonal")
        t = self.year_index(year)
        return float(self.values[t, cluster, self.country_index(m), self.country_index(n)])

    def iter_pairs(self) -> Iterator[tuple[int, int, str, str, float]]:
        """Yield (year, cluster, m, n, weight) with m < n alphabetically."""
        for t, year in enumerate(self.years):
            for j in range(self.n_clusters):
                for a in range(len(self.countries)):
                    for b in range(a + 1, len(self.countries)):
                        yield (
                            int(year),
                            j,
                            self.countries[a],
                            self.countries[b],
                            float(self.values[t, j, a, b]),
                        )


def paper_collab_matrix(credit: CountryCredit, countries: Sequence[str]) -> np.ndarray:
    """Outer product of a paper's credit vector over a fixed country axis."""
    vec = np.zeros(len(countries))
    pos = {c: i for i, c in enumerate(countries)}
    for country, share in credit.credits.items():
        try:
            vec[pos[country]] = share
        except KeyError:
            raise ValueError(f"country {country} not on the given axis") from None
    return np.outer(vec, vec)


def build_collab_tensor(
    doc_ids: Sequence[str],
    years: Sequence[int],
    credits: Sequence[Optional[CountryCredit]],
    thetas: Sequence[Optional[np.ndarray]],
    cluster_map: ClusterAssignment,
) -> CollaborationTensor:
    """Accumulate per-paper collaboration matrices into a tensor.

    The paper's outer-product matrix is split across clusters by its
    topic-mixture mass per cluster; those cluster weights must sum to
    1 within 1e-9 for every paper.
    """
    n = len(doc_ids)
    if not (len(years) == len(credits) == len(thetas) == n):
        raise ValueError("doc_ids, years, credits and thetas must align")
    if n == 0:
        raise ValueError("no papers to accumulate")
    for doc_id, credit, theta in zip(doc_ids, credits, thetas):
        if credit is None:
            raise ValueError(f"paper {doc_id} has no country credit")
        if theta is None:
            raise ValueError(f"paper {doc_id} has no topic mixture")

    topic_to_cluster = cluster_map.as_array()
    n_clusters = cluster_map.n_clusters
    year_axis = np.array(sorted({int(y) for y in years}), dtype=np.int64)
    year_pos = {int(y): i for i, y in enumerate(year_axis)}
    country_axis = sorted({c for credit in credits for c in credit.credits})
    country_pos = {c: i for i, c in enumerate(country_axis)}
    c = len(country_axis)

    values = np.zeros((year_axis.size, n_clusters, c, c))
    for doc_id, year, credit, theta in zip(doc_ids, years, credits, thetas):
        theta = np.asarray(theta, dtype=float)
        if theta.shape[0] != topic_to_cluster.shape[0]:
            raise ValueError(
                f"paper {doc_id}: topic mixture has {theta.shape[0]} topics, "
                f"cluster map covers {topic_to_cluster.shape[0]}"
            )
        cluster_mass = np.bincount(topic_to_cluster, weights=theta, minlength=n_clusters)
        if abs(cluster_mass.sum() - 1.0) > CREDIT_SUM_TOL:
            raise ValueError(
                f"paper {doc_id}: cluster weights sum to {cluster_mass.sum()!r}, expected 1"
            )
        outer = np.zeros((c, c))
        vec = np.zeros(c)
        for country, share in credit.credits.items():
            vec[country_pos[country]] = share
        np.outer(vec, vec, out=outer)
        t = year_pos[int(year)]
        values[t] += cluster_mass[:, None, None] * outer[None, :, :]
    return CollaborationTensor(years=year_axis, countries=country_axis, values=values)
