import numpy as np
import pytest

from rescap.corpus import PaperRecord, build_vocabulary, tokenize


def make_record(doc_id, year=2000, countries=("US",), text="alpha beta gamma"):
    return PaperRecord(
        id=doc_id,
        year=year,
        title=f"title {doc_id}",
        abstract=text,
        author_countries=list(countries),
        keywords=[],
    )


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def two_topic_corpus():
    """Forty short documents drawn from two disjoint word pools."""
    rng = np.random.default_rng(7)
    pools = [
        ["apple", "pear", "plum", "grape", "melon"],
        ["iron", "steel", "zinc", "brass", "chrome"],
    ]
    records = []
    labels = []
    for d in range(40):
        topic = d % 2
        words = rng.choice(pools[topic], size=12)
        records.append(
            make_record(f"doc-{d:03d}", year=2000 + d % 2, text=" ".join(words))
        )
        labels.append(topic)
    vocab = build_vocabulary(records, min_count=0, tfidf_min=0.0)
    corpus = tokenize(records, vocab)
    return corpus, vocab, labels
