"""National research capability: output tensors, comparative advantage, ranks.

The central object is a year x country x cluster tensor of fractional
publication output. Comparative advantage is measured by the normalized
revealed comparative advantage (NRCA): the share of world output a
country produces in a cluster minus the share expected if its output
were spread like the world's. Positive entries mark capability; the
binary pattern feeds the Jaccard capability distance used downstream.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from rescap.corpus import CountryCredit, collaboration_ratio
from rescap.taxonomy import ClusterAssignment

logger = logging.getLogger(__name__)

DEFAULT_MIN_PAPERS = 250.0
DEFAULT_LOESS_SPAN = 0.75


@dataclass
class CapabilityTensor:
    """Fractional output R indexed (year, country, cluster)."""

    years: np.ndarray
    countries: list[str]
    values: np.ndarray

    @property
    def n_clusters(self) -> int:
        return self.values.shape[2]

    def country_year_totals(self) -> np.ndarray:
        """R^i_t: output of country i in year t, shape (T, C)."""
        return self.values.sum(axis=2)

    def cluster_year_totals(self) -> np.ndarray:
        """R_{j,t}: world output in cluster j in year t, shape (T, J)."""
        return self.values.sum(axis=1)

    def year_totals(self) -> np.ndarray:
        """R_t: world output in year t, shape (T,)."""
        return self.values.sum(axis=(1, 2))

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


@dataclass
class NrcaTensor:
    """NRCA values and their positive-advantage binarization."""

    years: np.ndarray
    countries: list[str]
    values: np.ndarray
    binary: np.ndarray

    @property
    def n_clusters(self) -> int:
        return self.values.shape[2]

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

    def profile(self, year: int, country: str) -> np.ndarray:
        """Binary capability vector of one country in one year."""
        return self.binary[self.year_index(year), self.country_index(country)]


def build_capability(
    doc_ids: Sequence[str],
    years: Sequence[int],
    credits: Sequence[Optional[CountryCredit]],
    thetas: Sequence[Optional[np.ndarray]],
    cluster_map: ClusterAssignment,
) -> CapabilityTensor:
    """Accumulate fractional output into a (year, country, cluster) tensor.

    Each paper contributes credit_c * cluster_mass_j to cell
    (year, c, j), where cluster mass sums the paper's topic mixture over
    the topics assigned to cluster j. Every paper must come with both a
    credit split and a topic mixture.
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

    values = np.zeros((year_axis.size, len(country_axis), n_clusters))
    for year, credit, theta in zip(years, credits, thetas):
        theta = np.asarray(theta, dtype=float)
        if theta.shape[0] != topic_to_cluster.shape[0]:
            raise ValueError(
                f"topic mixture has {theta.shape[0]} topics, "
                f"cluster map covers {topic_to_cluster.shape[0]}"
            )
        cluster_mass = np.bincount(topic_to_cluster, weights=theta, minlength=n_clusters)
        t = year_pos[int(year)]
        for country, share in credit.credits.items():
            values[t, country_pos[country]] += share * cluster_mass
    return CapabilityTensor(years=year_axis, countries=country_axis, values=values)


def nrca(capability: CapabilityTensor) -> NrcaTensor:
    """NRCA^i_{j,t} = R^i_{j,t} / R_t  -  R^i_t R_{j,t} / R_t^2.

    Both margins of each year slice sum to zero. Years with no output at
    all carry no information and are dropped with a warning. Strictly
    positive values binarize to True; exact zeros do not.
    """
    totals = capability.year_totals()
    keep = totals > 0
    dropped = capability.years[~keep]
    if dropped.size:
        logger.warning("dropping years with zero total output: %s", dropped.tolist())
    if not keep.any():
        raise ValueError("capability tensor has no output in any year")

    years = capability.years[keep]
    r = capability.values[keep]
    r_t = totals[keep][:, None, None]
    country_tot = r.sum(axis=2)[:, :, None]
    cluster_tot = r.sum(axis=1)[:, None, :]
    values = r / r_t - country_tot * cluster_tot / r_t**2
    return NrcaTensor(
        years=years,
        countries=list(capability.countries),
        values=values,
        binary=values > 0,
    )


def capability_distance(a, b) -> float:
    """Jaccard distance between two binary capability vectors.

    1 - |intersection| / |union|; two all-zero vectors are identical in
    the only sense available, so their distance is 0.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    a = a.astype(bool)
    b = b.astype(bool)
    union = int(np.sum(a | b))
    if union == 0:
        return 0.0
    return 1.0 - int(np.sum(a & b)) / union


@dataclass
class RankSeries:
    """Per-year dense ranks of countries within one cluster (1 = best)."""

    cluster: int
    years: np.ndarray
    countries: list[str]
    ranks: np.ndarray

    def series(self, country: str) -> np.ndarray:
        try:
            c = self.countries.index(country)
        except ValueError:
            raise KeyError(f"unknown country: {country}") from None
        return self.ranks[:, c]


def rank_series(
    advantage: NrcaTensor,
    cluster: int,
    countries: Optional[Sequence[str]] = None,
) -> RankSeries:
    """Rank countries by NRCA within a cluster, year by year.

    Dense ranking: the largest value gets rank 1, ties share a rank, and
    the next distinct value gets the following integer.
    """
    if not 0 <= cluster < advantage.n_clusters:
        raise ValueError(f"cluster must be in [0, {advantage.n_clusters}), got {cluster}")
    if countries is None:
        countries = list(advantage.countries)
    else:
        countries = list(countries)
    idx = [advantage.country_index(c) for c in countries]
    vals = advantage.values[:, idx, cluster]
    ranks = np.empty_like(vals, dtype=np.int64)
    for t in range(vals.shape[0]):
        ranks[t] = rankdata(-vals[t], method="dense")
    return RankSeries(
        cluster=cluster,
        years=advantage.years.copy(),
        countries=countries,
        ranks=ranks,
    )


def loess_smooth(x, y, span: float = DEFAULT_LOESS_SPAN) -> np.ndarray:
    """Locally weighted linear regression with tricube weights.

    At each point, the max(ceil(span * n), 2) nearest neighbours get
    tricube weights over the neighbourhood radius and a weighted line is
    fitted; the smoothed value is its prediction there. Series with
    fewer than 3 points are returned unchanged.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D arrays of equal length")
    if not 0 < span <= 1:
        raise ValueError(f"span must be in (0, 1], got {span}")
    n = x.size
    if n < 3:
        logger.warning("loess: only %d points, returning series unchanged", n)
        return y.copy()

    r = max(int(math.ceil(span * n)), 2)
    out = np.empty(n)
    for i in range(n):
        dist = np.abs(x - x[i])
        radius = np.partition(dist, r - 1)[r - 1]
        if radius <= 0:
            # All in-window points share x[i]; the local line degenerates
            # to the plain mean of the coincident points.
            out[i] = y[dist <= 0].mean()
            continue
        u = np.clip(dist / radius, 0.0, 1.0)
        w = (1 - u**3) ** 3
        dx = x - x[i]
        s0 = w.sum()
        s1 = float(w @ dx)
        s2 = float(w @ dx**2)
        t0 = float(w @ y)
        t1 = float(w @ (dx * y))
        denom = s0 * s2 - s1 * s1
        if denom <= 1e-12 * s0 * s2 or s2 == 0.0:
            out[i] = t0 / s0
        else:
            # Centered design: intercept at x[i] is the fitted value.
            out[i] = (s2 * t0 - s1 * t1) / denom
    return out


def country_filter(records, min_papers: float = DEFAULT_MIN_PAPERS) -> list[str]:
    """Countries whose fractional paper total strictly exceeds a floor.

    Sorted by total, largest first; ties break alphabetically.
    """
    rows = collaboration_ratio(records)
    kept = [row for row in rows if row.total > min_papers]
    kept.sort(key=lambda r: (-r.total, r.country))
    return [row.country for row in kept]
