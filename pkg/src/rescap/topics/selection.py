"""Topic-count selection from a high-K probe fit.

A static LDA is run with a deliberately large number of topics. Each
document is assigned to its argmax topic, and each topic t gets a usage
proportion p(t): the fraction of its documents that carry more than
``w_th`` tokens. Significant topics attract the long documents, so their
p(t) values cluster high while leftover topics sit low. A Gaussian KDE
is fit to the p(t) sample and the cutoff proportion is placed where the
KDE derivative is most negative within the searched interval; the
returned K counts the topics strictly above the cutoff.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from rescap.errors import KdeDegenerateError
from rescap.topics.lda import DEFAULT_BURN_IN, DEFAULT_ETA, DEFAULT_SWEEPS, StaticLda

logger = logging.getLogger(__name__)


@dataclass
class TopicUsageProfile:
    """Per-topic document counts and long-document proportions.

    p is NaN for topics that attracted no documents; those topics are
    never counted as significant.
    """

    n_docs: np.ndarray
    n_long: np.ndarray
    p: np.ndarray


def usage_profile(assigned_topics, doc_lengths, n_topics, w_th=50) -> TopicUsageProfile:
    assigned_topics = np.asarray(assigned_topics)
    doc_lengths = np.asarray(doc_lengths)
    n_docs = np.bincount(assigned_topics, minlength=n_topics).astype(np.int64)
    long_mask = doc_lengths > w_th
    n_long = np.bincount(assigned_topics[long_mask], minlength=n_topics).astype(np.int64)
    with np.errstate(invalid="ignore"):
        p = np.where(n_docs > 0, n_long / np.maximum(n_docs, 1), np.nan)
    return TopicUsageProfile(n_docs=n_docs, n_long=n_long, p=p)


def silverman_bandwidth(values) -> float:
    """Rule-of-thumb bandwidth 0.9 * min(std, IQR/1.34) * n^(-1/5)."""
    values = np.asarray(values, dtype=float)
    std = float(np.std(values, ddof=1))
    q75, q25 = np.percentile(values, [75, 25])
    iqr = float(q75 - q25)
    spread = min(std, iqr / 1.34) if iqr > 0 else std
    if spread <= 0:
        raise KdeDegenerateError("zero spread in usage proportions")
    return 0.9 * spread * len(values) ** (-0.2)


def kde_derivative(values, grid, bandwidth) -> np.ndarray:
    """Analytic derivative of a Gaussian-kernel density estimate."""
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    u = (grid[:, None] - values[None, :]) / bandwidth
    phi = np.exp(-0.5 * u * u) / np.sqrt(2.0 * np.pi)
    return (-u * phi).sum(axis=1) / (len(values) * bandwidth**2)


class TopicCountSelector(BaseEstimator):
    """Choose the number of topics from a probe LDA's usage profile.

    Parameters
    ----------
    k_probe : topic count of the probe fit (intentionally large).
    w_th : token-count threshold separating long documents.
    grid_size : evaluation grid resolution over [0, 1].
    search_pct : percentile pair of the p(t) sample bounding the cutoff
        search interval.
    alpha, eta, sweeps, burn_in, seed : probe LDA configuration.

    Attributes
    ----------
    n_topics_ : selected K.
    cutoff_ : proportion cutoff, or None when usage was uniform.
    profile_ : TopicUsageProfile of the probe fit.
    """

    def __init__(self, k_probe=500, w_th=50, grid_size=512, search_pct=(10.0, 90.0),
                 alpha=None, eta=DEFAULT_ETA, sweeps=DEFAULT_SWEEPS,
                 burn_in=DEFAULT_BURN_IN, seed=0):
        self.k_probe = k_probe
        self.w_th = w_th
        self.grid_size = grid_size
        self.search_pct = search_pct
        self.alpha = alpha
        self.eta = eta
        self.sweeps = sweeps
        self.burn_in = burn_in
        self.seed = seed

    def fit(self, X, y=None):
        if self.k_probe < 2:
            raise ValueError("k_probe must be >= 2")
        probe = StaticLda(
            n_topics=self.k_probe, alpha=self.alpha, eta=self.eta,
            sweeps=self.sweeps, burn_in=self.burn_in, seed=self.seed,
        ).fit(X)
        assigned = np.argmax(probe.theta_, axis=1)
        self.probe_ = probe
        self.profile_ = usage_profile(assigned, probe.doc_lengths_, self.k_probe, self.w_th)

        used = self.profile_.p[~np.isnan(self.profile_.p)]
        if len(used) < 2:
            raise KdeDegenerateError(
                f"only {len(used)} topics attracted documents; cannot estimate a cutoff"
            )
        if np.ptp(used) == 0.0:
            # Uniform usage: no cutoff separates anything, so every used
            # topic counts as significant.
            logger.warning("uniform topic usage (p=%.3f everywhere); keeping all used topics", used[0])
            self.cutoff_ = None
            self.n_topics_ = int(len(used))
            return self

        bandwidth = silverman_bandwidth(used)
        lo, hi = np.percentile(used, list(self.search_pct))
        grid = np.linspace(0.0, 1.0, int(self.grid_size))
        mask = (grid >= lo) & (grid <= hi)
        search = grid[mask] if mask.sum() >= 8 else np.linspace(lo, hi, 128)
        deriv = kde_derivative(used, search, bandwidth)
        self.bandwidth_ = bandwidth
        self.cutoff_ = float(search[np.argmin(deriv)])
        self.n_topics_ = int(np.sum(used > self.cutoff_))
        return self


def select_num_topics(corpus, k_probe=500, w_th=50, seed=0, **probe_params) -> int:
    """Functional wrapper around :class:`TopicCountSelector`."""
    selector = TopicCountSelector(k_probe=k_probe, w_th=w_th, seed=seed, **probe_params)
    return selector.fit(corpus).n_topics_
