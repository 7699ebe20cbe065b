"""Collapsed Gibbs sampling kernel for topic inference.

The kernel integrates out the topic-word and document-topic
distributions and resamples one token assignment at a time from

    p(z_i = k | z_-i, w) propto (n_dk + alpha_k)
                                * (n_kw + eta_kw) / (n_k + sum_v eta_kv)

where all counts exclude the current token. The topic-word prior is a
full K x V pseudo-count matrix so that a later epoch can be chained on
an earlier epoch's posterior. Sweeps after burn-in are accumulated; the
averaged counts give posterior-mean estimates of the topic-word rows and
document mixtures.

All randomness comes from numba's MT19937 stream seeded inside the
kernel, so results are bit-identical for identical inputs and seed.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def run_gibbs(token_words, token_docs, n_docs, n_terms, alpha, eta, sweeps, burn_in, seed, track_marginals):
    """Run collapsed Gibbs sampling over a flattened token stream.

    token_words and token_docs are parallel int32 arrays giving each
    token's vocabulary index and document index. Returns the final
    assignment vector, summed post-burn-in count matrices (doc x topic
    and topic x word), the number of retained sweeps, and, when
    requested, per-token topic-indicator sums for marginal estimates.
    """
    n_topics = alpha.shape[0]
    np.random.seed(seed)
    n_tokens = token_words.shape[0]

    ndk = np.zeros((n_docs, n_topics))
    nkv = np.zeros((n_topics, n_terms))
    nk = np.zeros(n_topics)
    eta_sum = np.zeros(n_topics)
    for k in range(n_topics):
        total = 0.0
        for v in range(n_terms):
            total += eta[k, v]
        eta_sum[k] = total

    z = np.empty(n_tokens, dtype=np.int32)
    for i in range(n_tokens):
        k = np.random.randint(n_topics)
        z[i] = k
        ndk[token_docs[i], k] += 1.0
        nkv[k, token_words[i]] += 1.0
        nk[k] += 1.0

    sum_ndk = np.zeros((n_docs, n_topics))
    sum_nkv = np.zeros((n_topics, n_terms))
    if track_marginals:
        marginals = np.zeros((n_tokens, n_topics))
    else:
        marginals = np.zeros((1, 1))

    p = np.empty(n_topics)
    kept = 0
    for sweep in range(sweeps):
        for i in range(n_tokens):
            d = token_docs[i]
            w = token_words[i]
            k = z[i]
            ndk[d, k] -= 1.0
            nkv[k, w] -= 1.0
            nk[k] -= 1.0

            total = 0.0
            for kk in range(n_topics):
                val = (ndk[d, kk] + alpha[kk]) * (nkv[kk, w] + eta[kk, w]) / (nk[kk] + eta_sum[kk])
                p[kk] = val
                total += val
            u = np.random.random() * total
            acc = 0.0
            knew = n_topics - 1
            for kk in range(n_topics):
                acc += p[kk]
                if u < acc:
                    knew = kk
                    break

            z[i] = knew
            ndk[d, knew] += 1.0
            nkv[knew, w] += 1.0
            nk[knew] += 1.0

        if sweep >= burn_in:
            kept += 1
            sum_ndk += ndk
            sum_nkv += nkv
            if track_marginals:
                for i in range(n_tokens):
                    marginals[i, z[i]] += 1.0

    return z, sum_ndk, sum_nkv, kept, marginals


def flatten_documents(docs):
    """Concatenate per-document token arrays into parallel flat arrays."""
    n_tokens = sum(len(d) for d in docs)
    token_words = np.empty(n_tokens, dtype=np.int32)
    token_docs = np.empty(n_tokens, dtype=np.int32)
    pos = 0
    for d, doc in enumerate(docs):
        m = len(doc)
        token_words[pos : pos + m] = np.asarray(doc, dtype=np.int32)
        token_docs[pos : pos + m] = d
        pos += m
    return token_words, token_docs


def posterior_means(sum_ndk, sum_nkv, kept, alpha, eta, doc_lengths):
    """Smoothed posterior-mean topic mixtures and topic-word rows.

    Averaged counts plus prior pseudo-counts, normalized; every returned
    row is strictly positive and sums to 1.
    """
    mean_ndk = sum_ndk / kept
    mean_nkv = sum_nkv / kept
    theta = (mean_ndk + alpha[None, :]) / (doc_lengths[:, None] + alpha.sum())
    eta_sum = eta.sum(axis=1)
    mean_nk = mean_nkv.sum(axis=1)
    beta = (mean_nkv + eta) / (mean_nk + eta_sum)[:, None]
    return theta, beta
