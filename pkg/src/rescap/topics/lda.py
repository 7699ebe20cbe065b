"""Static latent Dirichlet allocation via collapsed Gibbs sampling."""

from __future__ import annotations

import logging
import warnings

import numpy as np
from sklearn.base import BaseEstimator

from rescap.corpus import TokenizedCorpus
from rescap.errors import EmptyCorpusError
from rescap.topics.gibbs import flatten_documents, posterior_means, run_gibbs
from rescap.topics.state import TopicModelState

logger = logging.getLogger(__name__)

DEFAULT_ETA = 0.01
DEFAULT_SWEEPS = 1000
DEFAULT_BURN_IN = 200


def resolve_alpha(alpha, n_topics) -> np.ndarray:
    """Expand the doc-topic prior to a length-K vector (default 50/K)."""
    if alpha is None:
        return np.full(n_topics, 50.0 / n_topics)
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    if alpha.size == 1:
        return np.full(n_topics, float(alpha[0]))
    if alpha.shape != (n_topics,):
        raise ValueError(f"alpha must be scalar or length {n_topics}")
    if np.any(alpha <= 0):
        raise ValueError("alpha entries must be positive")
    return alpha.copy()


def resolve_eta(eta, n_topics, n_terms) -> np.ndarray:
    """Expand the topic-word prior to a K x V pseudo-count matrix."""
    eta = np.asarray(eta, dtype=float)
    if eta.ndim == 0:
        return np.full((n_topics, n_terms), float(eta))
    if eta.shape != (n_topics, n_terms):
        raise ValueError(f"eta must be scalar or shape ({n_topics}, {n_terms})")
    if np.any(eta <= 0):
        raise ValueError("eta entries must be positive")
    return eta.copy()


def extract_documents(X):
    """Accept a TokenizedCorpus or a plain sequence of token-index arrays."""
    if isinstance(X, TokenizedCorpus):
        docs = X.tokens
        n_terms = X.n_terms
        doc_ids = list(X.doc_ids)
        years = X.years.copy()
        terms = list(X.vocabulary.terms)
    else:
        docs = [np.asarray(d, dtype=np.int32) for d in X]
        n_terms = int(max((d.max() for d in docs if len(d)), default=-1)) + 1
        doc_ids = [str(i) for i in range(len(docs))]
        years = np.zeros(len(docs), dtype=np.int64)
        terms = []
    return docs, n_terms, doc_ids, years, terms


class StaticLda(BaseEstimator):
    """Single-epoch topic model fit by collapsed Gibbs sampling.

    Parameters
    ----------
    n_topics : number of topics, at least 1.
    alpha : doc-topic Dirichlet; scalar, length-K vector, or None for the
        symmetric 50/K default.
    eta : topic-word Dirichlet; scalar smoothing or a full K x V
        pseudo-count matrix.
    sweeps, burn_in : total Gibbs sweeps and how many to discard.
    seed : RNG seed; identical inputs and seed give bit-identical fits.
    track_assignment_marginals : also accumulate per-token topic
        indicator averages (memory scales with tokens x topics).

    Attributes
    ----------
    beta_ : (n_topics, n_terms) row-stochastic topic-word matrix.
    theta_ : (n_docs, n_topics) smoothed document mixtures.
    assignment_marginals_ : per-token posterior topic frequencies, only
        when tracking was requested.
    state_ : the fit wrapped as a single-epoch TopicModelState.
    """

    def __init__(self, n_topics=10, alpha=None, eta=DEFAULT_ETA, sweeps=DEFAULT_SWEEPS,
                 burn_in=DEFAULT_BURN_IN, seed=0, track_assignment_marginals=False):
        self.n_topics = n_topics
        self.alpha = alpha
        self.eta = eta
        self.sweeps = sweeps
        self.burn_in = burn_in
        self.seed = seed
        self.track_assignment_marginals = track_assignment_marginals

    def fit(self, X, y=None):
        if self.n_topics < 1:
            raise ValueError("n_topics must be >= 1")
        if not 0 <= self.burn_in < self.sweeps:
            raise ValueError("need 0 <= burn_in < sweeps")
        docs, n_terms, doc_ids, years, terms = extract_documents(X)
        token_words, token_docs = flatten_documents(docs)
        if len(token_words) == 0:
            raise EmptyCorpusError("cannot fit a topic model on a zero-token corpus")
        if self.n_topics > len(docs):
            warnings.warn(
                f"n_topics={self.n_topics} exceeds the {len(docs)} documents; "
                "most topics will go unused"
            )

        alpha = resolve_alpha(self.alpha, self.n_topics)
        eta = resolve_eta(self.eta, self.n_topics, n_terms)
        z, sum_ndk, sum_nkv, kept, marginals = run_gibbs(
            token_words, token_docs, len(docs), n_terms, alpha, eta,
            int(self.sweeps), int(self.burn_in), int(self.seed) % (2**32),
            bool(self.track_assignment_marginals),
        )
        doc_lengths = np.array([len(d) for d in docs], dtype=float)
        theta, beta = posterior_means(sum_ndk, sum_nkv, kept, alpha, eta, doc_lengths)

        self.n_terms_ = n_terms
        self.doc_lengths_ = doc_lengths
        self.assignments_ = z
        self.theta_ = theta
        self.beta_ = beta
        self.n_kept_sweeps_ = kept
        if self.track_assignment_marginals:
            self.assignment_marginals_ = marginals / kept
        epoch_label = int(years.max()) if len(years) else 0
        self.state_ = TopicModelState(
            k=self.n_topics,
            epochs=np.array([epoch_label], dtype=np.int64),
            alpha=alpha[None, :].copy(),
            beta=beta[None, :, :].copy(),
            doc_ids=doc_ids,
            doc_theta=theta,
            doc_years=years,
            terms=terms,
        )
        return self
