"""Synthetic corpora and gravity panels with known ground truth.

Documents are drawn from a planted topic model: each topic is a
Dirichlet draw over a synthetic vocabulary, each document gets a main
topic and a mixture concentrated on it, and author countries are drawn
with per-cluster multipliers so that planted specialization shows up as
comparative advantage downstream. The gravity generator produces
pair-year panels that follow the estimating equation exactly, plus the
coefficients used, so recovery can be checked to tight tolerances.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from rescap.corpus import PaperRecord
from rescap.errors import ConfigError
from rescap.gravity import GravityObservation, haversine_km

DEFAULT_COUNTRIES = ("US", "CN", "JP", "DE", "GB", "FR", "KR", "IT", "CA", "IN")


@dataclass
class SynthSpec:
    """Parameters of a planted-topic corpus. Only the seed is required."""

    seed: int
    n_docs: int = 2000
    n_topics: int = 5
    vocab_size: int = 500
    n_clusters: int = 5
    years: tuple[int, int] = (1976, 2016)
    doc_length_mean: float = 65.0
    doc_length_shape: float = 8.0
    main_topic_boost: float = 30.0
    background_concentration: float = 0.5
    word_concentration: float = 0.1
    countries: tuple[str, ...] = DEFAULT_COUNTRIES
    country_weights: Optional[dict[str, float]] = None
    cluster_multipliers: dict[str, dict[int, float]] = field(default_factory=dict)
    collab_rate: float = 0.3
    max_team: int = 4
    topic_clusters: Optional[list[int]] = None
    topic_doc_counts: Optional[list[int]] = None
    topic_length_means: Optional[list[float]] = None
    disjoint_topic_words: bool = False
    cluster_coherence: float = 0.0

    def resolved_topic_clusters(self) -> list[int]:
        if self.topic_clusters is not None:
            if len(self.topic_clusters) != self.n_topics:
                raise ConfigError("topic_clusters must list one cluster per topic")
            if sorted(set(self.topic_clusters)) != list(range(self.n_clusters)):
                raise ConfigError("topic_clusters must use every cluster id once or more")
            return list(self.topic_clusters)
        return [k * self.n_clusters // self.n_topics for k in range(self.n_topics)]


@dataclass
class GroundTruth:
    """What the generator planted, for scoring fitted output."""

    seed: int
    n_topics: int
    vocab_size: int
    topic_clusters: list[int]
    topic_word: np.ndarray
    countries: list[str]
    cluster_multipliers: dict[str, dict[int, float]]
    doc_ids: list[str]
    doc_years: list[int]
    doc_main_topic: list[int]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_topics": self.n_topics,
            "vocab_size": self.vocab_size,
            "topic_clusters": list(self.topic_clusters),
            "topic_word": [[float(v) for v in row] for row in self.topic_word],
            "countries": list(self.countries),
            "cluster_multipliers": {
                c: {str(j): float(m) for j, m in mults.items()}
                for c, mults in self.cluster_multipliers.items()
            },
            "doc_ids": list(self.doc_ids),
            "doc_years": [int(y) for y in self.doc_years],
            "doc_main_topic": [int(t) for t in self.doc_main_topic],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "GroundTruth":
        return cls(
            seed=int(payload["seed"]),
            n_topics=int(payload["n_topics"]),
            vocab_size=int(payload["vocab_size"]),
            topic_clusters=[int(j) for j in payload["topic_clusters"]],
            topic_word=np.asarray(payload["topic_word"], dtype=float),
            countries=list(payload["countries"]),
            cluster_multipliers={
                c: {int(j): float(m) for j, m in mults.items()}
                for c, mults in payload["cluster_multipliers"].items()
            },
            doc_ids=list(payload["doc_ids"]),
            doc_years=[int(y) for y in payload["doc_years"]],
            doc_main_topic=[int(t) for t in payload["doc_main_topic"]],
        )


def _term(i: int) -> str:
    return f"w{i:04d}"


def generate_corpus(spec: SynthSpec) -> tuple[list[PaperRecord], GroundTruth]:
    """Draw a corpus of planted-topic records.

    Per-topic document counts and length means override the global
    n_docs and doc_length_mean when given, which makes topics differ in
    how many long documents they attract.
    """
    if spec.vocab_size < 2 * spec.n_topics:
        raise ConfigError(
            f"vocab_size {spec.vocab_size} too small for {spec.n_topics} topics "
            f"(need at least {2 * spec.n_topics})"
        )
    if not spec.countries:
        raise ConfigError("need at least one country")
    if not 0 <= spec.collab_rate <= 1:
        raise ConfigError(f"collab_rate must be in [0, 1], got {spec.collab_rate}")
    if spec.topic_doc_counts is not None and len(spec.topic_doc_counts) != spec.n_topics:
        raise ConfigError("topic_doc_counts must list one count per topic")
    if spec.topic_length_means is not None and len(spec.topic_length_means) != spec.n_topics:
        raise ConfigError("topic_length_means must list one mean per topic")

    if spec.disjoint_topic_words and spec.cluster_coherence > 0:
        raise ConfigError("disjoint_topic_words and cluster_coherence are exclusive")
    if not 0 <= spec.cluster_coherence < 1:
        raise ConfigError(f"cluster_coherence must be in [0, 1), got {spec.cluster_coherence}")

    rng = np.random.default_rng(spec.seed)
    k, v = spec.n_topics, spec.vocab_size
    topic_clusters = spec.resolved_topic_clusters()
    if spec.disjoint_topic_words:
        # Each topic draws only from its own vocabulary block, so no two
        # planted topics can be confused through shared words.
        block = v // k
        topic_word = np.zeros((k, v))
        for t in range(k):
            lo = t * block
            hi = (t + 1) * block if t < k - 1 else v
            topic_word[t, lo:hi] = rng.dirichlet(
                np.full(hi - lo, spec.word_concentration)
            )
    else:
        topic_word = rng.dirichlet(np.full(v, spec.word_concentration), size=k)
        if spec.cluster_coherence > 0:
            # Blend each topic toward a shared per-cluster base so that
            # topics in one cluster are closer in word space than topics
            # in different clusters.
            base = rng.dirichlet(
                np.full(v, spec.word_concentration), size=spec.n_clusters
            )
            topic_word = (
                spec.cluster_coherence * base[np.array(topic_clusters)]
                + (1 - spec.cluster_coherence) * topic_word
            )

    weights = np.array(
        [
            (spec.country_weights or {}).get(c, 1.0)
            for c in spec.countries
        ],
        dtype=float,
    )
    if np.any(weights <= 0):
        raise ConfigError("country weights must be positive")

    if spec.topic_doc_counts is not None:
        main_topics = np.repeat(np.arange(k), spec.topic_doc_counts)
    else:
        main_topics = rng.integers(0, k, size=spec.n_docs)
    n_docs = main_topics.size
    if n_docs == 0:
        raise ConfigError("generator would produce zero documents")
    rng.shuffle(main_topics)

    length_means = (
        np.asarray(spec.topic_length_means, dtype=float)
        if spec.topic_length_means is not None
        else np.full(k, spec.doc_length_mean)
    )

    records: list[PaperRecord] = []
    doc_years: list[int] = []
    for d, main in enumerate(main_topics):
        conc = np.full(k, spec.background_concentration)
        conc[main] += spec.main_topic_boost
        theta = rng.dirichlet(conc)

        mean = length_means[main]
        shape = spec.doc_length_shape
        length = int(rng.negative_binomial(shape, shape / (shape + mean)))
        length = max(length, 3)
        word_probs = theta @ topic_word
        counts = rng.multinomial(length, word_probs)
        token_ids = np.repeat(np.arange(v), counts)
        rng.shuffle(token_ids)
        text = " ".join(_term(i) for i in token_ids)

        cluster = topic_clusters[main]
        pick = weights.copy()
        for ci, country in enumerate(spec.countries):
            pick[ci] *= spec.cluster_multipliers.get(country, {}).get(cluster, 1.0)
        pick /= pick.sum()
        team_countries = 2 if (rng.random() < spec.collab_rate and len(spec.countries) > 1) else 1
        chosen = rng.choice(len(spec.countries), size=team_countries, replace=False, p=pick)
        author_countries: list[str] = []
        for ci in chosen:
            author_countries.extend([spec.countries[ci]] * int(rng.integers(1, spec.max_team + 1)))

        year = int(rng.integers(spec.years[0], spec.years[1] + 1))
        doc_years.append(year)
        records.append(
            PaperRecord(
                id=f"syn-{d:06d}",
                year=year,
                title=f"study {d}",
                abstract=text,
                author_countries=author_countries,
                keywords=[],
            )
        )

    truth = GroundTruth(
        seed=spec.seed,
        n_topics=k,
        vocab_size=v,
        topic_clusters=topic_clusters,
        topic_word=topic_word,
        countries=list(spec.countries),
        cluster_multipliers={
            c: dict(m) for c, m in spec.cluster_multipliers.items()
        },
        doc_ids=[r.id for r in records],
        doc_years=doc_years,
        doc_main_topic=[int(t) for t in main_topics],
    )
    return records, truth


def usage_profile_spec(seed: int) -> SynthSpec:
    """A corpus whose topics split into heavy and light usage groups.

    Eight of forty topics draw long documents, the rest short ones, with
    equal document counts so a probe model at the planted topic count
    aligns with the planted topics instead of splitting the heavy ones.
    The share of long documents per topic is then bimodal, which is the
    shape the topic-count selection procedure keys on.
    """
    n_heavy, n_light = 8, 32
    k = n_heavy + n_light
    return SynthSpec(
        seed=seed,
        n_topics=k,
        vocab_size=800,
        n_clusters=k,
        topic_clusters=list(range(k)),
        years=(2000, 2004),
        topic_doc_counts=[55] * n_heavy + [200] * n_light,
        topic_length_means=[72.0] * n_heavy + [20.0] * n_light,
        doc_length_shape=30.0,
        main_topic_boost=60.0,
        background_concentration=0.05,
        collab_rate=0.2,
        disjoint_topic_words=True,
    )


def ring_coordinates(codes: Sequence[str]) -> dict[str, tuple[float, float]]:
    """Deterministic synthetic capitals spread around the globe.

    Longitudes are evenly spaced and latitudes cycle through three
    bands, so all pairwise distances are positive and mostly distinct.
    """
    n = len(codes)
    if n == 0:
        raise ValueError("no codes given")
    out = {}
    for i, code in enumerate(codes):
        lat = (20.0, 40.0, -10.0)[i % 3]
        lon = -180.0 + 360.0 * i / n
        out[code] = (lat, lon)
    return out


def write_corpus_jsonl(records: Sequence[PaperRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(
                json.dumps(
                    {
                        "id": record.id,
                        "year": record.year,
                        "title": record.title,
                        "abstract": record.abstract,
                        "keywords": record.keywords,
                        "authors": [{"country": c} for c in record.author_countries],
                    },
                    sort_keys=True,
                )
            )
            fh.write("\n")


def write_capitals_csv(coords: dict[str, tuple[float, float]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["country", "lat", "lon"])
        for code in sorted(coords):
            lat, lon = coords[code]
            writer.writerow([code, repr(float(lat)), repr(float(lon))])


def write_ground_truth(truth: GroundTruth, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(truth.to_dict(), fh, sort_keys=True)
        fh.write("\n")


def load_ground_truth(path) -> GroundTruth:
    with open(path, encoding="utf-8") as fh:
        return GroundTruth.from_dict(json.load(fh))


def generate_gravity_data(
    seed: int,
    n_obs: int = 3518,
    n_countries: int = 15,
    years: tuple[int, int] = (1980, 2016),
    pubs_elasticity: float = 0.6,
    distance_elasticity: float = -1.0,
    capability_penalty: float = -0.9,
    noise_sigma: float = 0.0,
    year_sigma: float = 0.3,
) -> tuple[list[GravityObservation], dict]:
    """Draw a pair-year panel that satisfies the gravity equation.

    Outputs, capitals, capability profiles and year effects are all
    synthetic; the log weight is built exactly from the coefficients
    given plus optional Gaussian noise. Returns the observations and the
    planted coefficients.
    """
    rng = np.random.default_rng(seed)
    lo, hi = years
    year_list = list(range(lo, hi + 1))
    codes = [f"C{i:02d}" for i in range(n_countries)]
    coords = ring_coordinates(codes)
    n_pairs = n_countries * (n_countries - 1) // 2
    total = n_pairs * len(year_list)
    if n_obs > total:
        raise ValueError(f"cannot draw {n_obs} rows from {total} pair-years")

    pubs = rng.lognormal(mean=6.0, sigma=0.8, size=(len(year_list), n_countries))
    profiles = rng.random(size=(len(year_list), n_countries, 5)) < 0.5
    effects = {year: (0.0 if t == 0 else float(rng.normal(0.0, year_sigma)))
               for t, year in enumerate(year_list)}

    rows = []
    for t, year in enumerate(year_list):
        for a in range(n_countries):
            for b in range(a + 1, n_countries):
                rows.append((t, year, a, b))
    chosen = np.sort(rng.choice(total, size=n_obs, replace=False))

    observations = []
    for idx in chosen:
        t, year, a, b = rows[idx]
        p_m = float(pubs[t, a])
        p_n = float(pubs[t, b])
        lat_a, lon_a = coords[codes[a]]
        lat_b, lon_b = coords[codes[b]]
        d = haversine_km(lat_a, lon_a, lat_b, lon_b)
        inter = int(np.sum(profiles[t, a] & profiles[t, b]))
        union = int(np.sum(profiles[t, a] | profiles[t, b]))
        c = 0.0 if union == 0 else 1.0 - inter / union
        log_w = (
            pubs_elasticity * (np.log(p_m) + np.log(p_n))
            + distance_elasticity * np.log(d)
            + capability_penalty * c
            + effects[year]
        )
        if noise_sigma > 0:
            log_w += float(rng.normal(0.0, noise_sigma))
        observations.append(
            GravityObservation(
                year=year,
                country_m=codes[a],
                country_n=codes[b],
                weight=float(np.exp(log_w)),
                pubs_m=p_m,
                pubs_n=p_n,
                distance_km=d,
                capability_dist=c,
            )
        )
    truth = {
        "pubs_elasticity": pubs_elasticity,
        "distance_elasticity": distance_elasticity,
        "capability_penalty": capability_penalty,
        "noise_sigma": noise_sigma,
        "year_effects": effects,
        "capitals": coords,
    }
    return observations, truth
