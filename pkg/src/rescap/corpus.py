"""Bibliographic record ingestion, tokenization, and fractional counting.

Input is JSON Lines, one record per line:

    {"id": "...", "year": 1998, "title": "...", "abstract": "...",
     "keywords": ["..."], "authors": [{"country": "US"}, ...]}

Each author contributes one country (the first affiliation). A paper's
credit is split across countries proportionally to author counts, so a
paper with three US and two KR authors adds 0.6 to US and 0.4 to KR.
"""

from __future__ import annotations

import json
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from rescap.countries import normalize_country
from rescap.errors import EmptyCorpusError, EmptyVocabularyError, ParseError

logger = logging.getLogger(__name__)

DEFAULT_STUDY_WINDOW = (1976, 2016)

_STRIP_RE = re.compile(r"[^a-z0-9\s]+")


@dataclass
class PaperRecord:
    """One admitted bibliographic record."""

    id: str
    year: int
    title: str
    abstract: str
    author_countries: list[str]
    keywords: list[str] = field(default_factory=list)


@dataclass
class CountryCredit:
    """Fractional publication credit of one paper, summing to 1."""

    paper_id: str
    credits: dict[str, float]

    @property
    def is_collaborative(self) -> bool:
        return len(self.credits) >= 2


@dataclass
class Vocabulary:
    """Filtered term list with stable, contiguous, lexicographic indices."""

    terms: list[str]
    df: np.ndarray
    tf: np.ndarray

    def __post_init__(self):
        self.index = {t: i for i, t in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term) -> bool:
        return term in self.index

    def to_dict(self) -> dict:
        return {
            "terms": list(self.terms),
            "df": [int(x) for x in self.df],
            "tf": [int(x) for x in self.tf],
        }

    @classmethod
    def from_dict(cls, payload) -> "Vocabulary":
        return cls(
            terms=list(payload["terms"]),
            df=np.asarray(payload["df"], dtype=np.int64),
            tf=np.asarray(payload["tf"], dtype=np.int64),
        )


@dataclass
class TokenizedCorpus:
    """Documents reduced to vocabulary indices, with year and credit."""

    doc_ids: list[str]
    tokens: list[np.ndarray]
    years: np.ndarray
    credits: list[CountryCredit]
    vocabulary: Vocabulary

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    @property
    def n_terms(self) -> int:
        return len(self.vocabulary)

    @property
    def total_tokens(self) -> int:
        return int(sum(len(t) for t in self.tokens))

    def epochs(self) -> list[tuple[int, np.ndarray]]:
        """Per-year document index groups, in ascending year order."""
        out = []
        for year in np.unique(self.years):
            out.append((int(year), np.flatnonzero(self.years == year)))
        return out


@dataclass
class IngestResult:
    records: list[PaperRecord]
    rejects: list[dict]


@dataclass
class CountrySummary:
    """One Table-1-shaped row of fractional paper counts."""

    country: str
    collaborative: float
    total: float
    ratio: float


def read_jsonl(path):
    """Yield (line_number, record_dict) from a JSON Lines file.

    Blank lines are skipped; a line that fails to parse raises
    :class:`ParseError` carrying the 1-based line number.
    """
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(lineno, str(exc)) from exc


def ingest(records_stream, study_window=DEFAULT_STUDY_WINDOW) -> IngestResult:
    """Validate raw record objects into PaperRecords plus a rejects report.

    Records that cannot be analyzed (no usable year, year outside the
    study window, no authors, or an author country that cannot be
    normalized) are routed to the rejects list with a reason code rather
    than silently dropped. The original corpus required manual
    affiliation backfilling for such records; this toolkit cannot do
    that, so they are reported instead.
    """
    lo, hi = study_window
    records: list[PaperRecord] = []
    rejects: list[dict] = []
    saw_any = False

    for raw in records_stream:
        saw_any = True
        rid = str(raw.get("id", "")) if isinstance(raw, dict) else ""

        def reject(reason, detail=""):
            rejects.append({"id": rid, "reason": reason, "detail": detail})

        if not isinstance(raw, dict):
            reject("not_an_object", f"got {type(raw).__name__}")
            continue
        year = raw.get("year")
        if year is None:
            reject("missing_year")
            continue
        try:
            year = int(year)
        except (TypeError, ValueError):
            reject("invalid_year", repr(raw.get("year")))
            continue
        if not lo <= year <= hi:
            reject("year_out_of_window", str(year))
            continue
        authors = raw.get("authors") or []
        if not authors:
            reject("missing_authors")
            continue
        countries = []
        bad = None
        for author in authors:
            raw_country = author.get("country") if isinstance(author, dict) else author
            code = normalize_country(raw_country)
            if code is None:
                bad = raw_country
                break
            countries.append(code)
        if bad is not None or not countries:
            reject("unmappable_country", repr(bad))
            continue
        records.append(
            PaperRecord(
                id=rid or f"record-{len(records)}",
                year=year,
                title=str(raw.get("title", "")),
                abstract=str(raw.get("abstract", "")),
                author_countries=countries,
                keywords=[str(k) for k in (raw.get("keywords") or [])],
            )
        )

    if not saw_any:
        raise EmptyCorpusError("input stream contained no records")
    if rejects:
        logger.info("ingest: admitted %d records, rejected %d", len(records), len(rejects))
    return IngestResult(records=records, rejects=rejects)


def fractional_credit(record: PaperRecord) -> CountryCredit:
    """Split one paper's unit credit across author countries.

    Credit per country is its author count over the total author count,
    so the credits always sum to exactly 1.
    """
    if not record.author_countries:
        raise ValueError(f"record {record.id} has no author countries")
    counts = Counter(record.author_countries)
    total = len(record.author_countries)
    return CountryCredit(
        paper_id=record.id,
        credits={country: n / total for country, n in sorted(counts.items())},
    )


def tokenize_text(text: str) -> list[str]:
    """Lowercase, drop non-alphanumeric characters, split on whitespace.

    Hyphenated and slashed compounds collapse into single tokens
    ("x-ray" -> "xray", "scrape-off" -> "scrapeoff"). No stemming.
    """
    return _STRIP_RE.sub("", text.lower()).split()


def build_vocabulary(records, tfidf_min: float = 1e-6, min_count: int = 10) -> Vocabulary:
    """Build the filtered vocabulary over the records' abstracts.

    A term is retained when its tf-idf is at least ``tfidf_min`` and its
    corpus frequency is strictly greater than ``min_count``. Here
    tf = corpus frequency / total tokens and idf = ln(n_docs / df), so a
    term present in every document has tf-idf 0 and is removed by any
    positive threshold. Term order is lexicographic, making the index
    assignment deterministic.
    """
    if tfidf_min < 0:
        raise ValueError("tfidf_min must be >= 0")
    if min_count < 0:
        raise ValueError("min_count must be >= 0")
    records = list(records)
    if not records:
        raise EmptyCorpusError("no records to build a vocabulary from")

    tf_counter: Counter = Counter()
    df_counter: Counter = Counter()
    n_docs = 0
    for record in records:
        tokens = tokenize_text(record.abstract)
        if not tokens:
            continue
        n_docs += 1
        tf_counter.update(tokens)
        df_counter.update(set(tokens))
    total_tokens = sum(tf_counter.values())
    if total_tokens == 0:
        raise EmptyCorpusError("corpus has no tokens")

    kept = []
    for term in sorted(tf_counter):
        tf = tf_counter[term]
        if tf <= min_count:
            continue
        tfidf = (tf / total_tokens) * math.log(n_docs / df_counter[term])
        if tfidf < tfidf_min:
            continue
        kept.append(term)
    if not kept:
        raise EmptyVocabularyError(
            f"all {len(tf_counter)} terms removed (tfidf_min={tfidf_min}, min_count={min_count})"
        )
    return Vocabulary(
        terms=kept,
        df=np.array([df_counter[t] for t in kept], dtype=np.int64),
        tf=np.array([tf_counter[t] for t in kept], dtype=np.int64),
    )


def tokenize(records, vocabulary: Vocabulary) -> TokenizedCorpus:
    """Reduce records to vocabulary token indices.

    Out-of-vocabulary tokens are dropped; documents left with zero
    tokens are excluded from the corpus and logged.
    """
    doc_ids = []
    tokens = []
    years = []
    credits = []
    dropped = 0
    for record in records:
        idx = [vocabulary.index[t] for t in tokenize_text(record.abstract) if t in vocabulary]
        if not idx:
            dropped += 1
            logger.info("tokenize: dropping %s (no in-vocabulary tokens)", record.id)
            continue
        doc_ids.append(record.id)
        tokens.append(np.asarray(idx, dtype=np.int32))
        years.append(record.year)
        credits.append(fractional_credit(record))
    if dropped:
        logger.info("tokenize: excluded %d empty documents", dropped)
    return TokenizedCorpus(
        doc_ids=doc_ids,
        tokens=tokens,
        years=np.asarray(years, dtype=np.int64),
        credits=credits,
        vocabulary=vocabulary,
    )


def collaboration_ratio(records) -> list[CountrySummary]:
    """Per-country fractional paper counts and collaborative share.

    A paper is collaborative when its author set spans at least two
    countries. Totals are fractional-credit sums, so the values are real
    numbers; the output rows are sorted by total descending, mirroring
    the summary-statistics table layout.
    """
    totals: dict[str, float] = {}
    collab: dict[str, float] = {}
    for record in records:
        credit = fractional_credit(record)
        for country, value in credit.credits.items():
            totals[country] = totals.get(country, 0.0) + value
            if credit.is_collaborative:
                collab[country] = collab.get(country, 0.0) + value
    rows = [
        CountrySummary(
            country=country,
            collaborative=collab.get(country, 0.0),
            total=total,
            ratio=collab.get(country, 0.0) / total,
        )
        for country, total in totals.items()
    ]
    rows.sort(key=lambda r: (-r.total, r.country))
    return rows
