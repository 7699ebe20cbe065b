"""Fitted topic model state and its checkpoint format."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CHECKPOINT_VERSION = 1


@dataclass
class TopicModelState:
    """Per-epoch topic-word distributions and per-document mixtures.

    beta has shape (n_epochs, k, n_terms) with row-stochastic, strictly
    positive topic rows; alpha has shape (n_epochs, k); doc_theta has
    one simplex row per training document.
    """

    k: int
    epochs: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    doc_ids: list[str]
    doc_theta: np.ndarray
    doc_years: np.ndarray
    terms: list[str] = field(default_factory=list)

    def __post_init__(self):
        self._doc_index = {doc_id: i for i, doc_id in enumerate(self.doc_ids)}

    @property
    def n_epochs(self) -> int:
        return len(self.epochs)

    @property
    def n_terms(self) -> int:
        return self.beta.shape[2]

    def epoch_index(self, epoch=None) -> int:
        """Index of an epoch year; None means the last epoch."""
        if epoch is None:
            return self.n_epochs - 1
        matches = np.flatnonzero(self.epochs == int(epoch))
        if len(matches) == 0:
            raise ValueError(f"epoch {epoch} not in model (have {list(self.epochs)})")
        return int(matches[0])

    def save(self, path):
        np.savez_compressed(
            path,
            version=np.int64(CHECKPOINT_VERSION),
            k=np.int64(self.k),
            epochs=self.epochs.astype(np.int64),
            alpha=self.alpha.astype(np.float64),
            beta=self.beta.astype(np.float64),
            doc_ids=np.asarray(self.doc_ids, dtype=np.str_),
            doc_theta=self.doc_theta.astype(np.float64),
            doc_years=self.doc_years.astype(np.int64),
            terms=np.asarray(self.terms, dtype=np.str_),
        )

    @classmethod
    def load(cls, path) -> "TopicModelState":
        with np.load(path, allow_pickle=False) as payload:
            version = int(payload["version"])
            if version != CHECKPOINT_VERSION:
                raise ValueError(f"unsupported checkpoint version {version}")
            return cls(
                k=int(payload["k"]),
                epochs=payload["epochs"],
                alpha=payload["alpha"],
                beta=payload["beta"],
                doc_ids=[str(x) for x in payload["doc_ids"]],
                doc_theta=payload["doc_theta"],
                doc_years=payload["doc_years"],
                terms=[str(x) for x in payload["terms"]],
            )


def doc_topic_distribution(state: TopicModelState, doc_id: str) -> np.ndarray:
    """Smoothed topic mixture of a training document."""
    try:
        row = state._doc_index[doc_id]
    except KeyError:
        raise KeyError(f"unknown document id: {doc_id}") from None
    return state.doc_theta[row]


def top_words(state: TopicModelState, epoch=None, topic: int = 0, n: int = 10) -> list[str]:
    """Highest-probability words of one topic at one epoch.

    Sorted by weight descending with lexicographic tie-breaking; n
    larger than the vocabulary is truncated.
    """
    t = state.epoch_index(epoch)
    if not 0 <= topic < state.k:
        raise ValueError(f"topic {topic} out of range [0, {state.k})")
    if not state.terms:
        raise ValueError("state carries no vocabulary terms")
    if n <= 0:
        return []
    row = state.beta[t, topic]
    order = sorted(range(len(state.terms)), key=lambda v: (-row[v], state.terms[v]))
    return [state.terms[v] for v in order[: min(n, len(state.terms))]]
