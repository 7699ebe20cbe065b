"""Independent reference implementations used as test oracles.

Each function here recomputes a quantity through a different algorithm
or code path than the package uses, so agreement is meaningful.
"""

from math import acos, cos, lgamma, radians, sin

import numpy as np


def enumeration_marginals(token_words, token_docs, n_docs, n_terms, alpha, eta):
    """Exact posterior P(z_i = 1) for a two-topic corpus by enumeration.

    Documents may have one or two tokens. The collapsed joint
    P(w, z) is evaluated for every assignment via bit-plane popcounts
    and log-gamma lookup tables, then normalized.
    """
    n_tokens = token_words.shape[0]
    if n_tokens > 24:
        raise ValueError("enumeration limited to 24 tokens")
    codes = np.arange(1 << n_tokens, dtype=np.uint32)
    logp = np.zeros(codes.size)

    for w in range(n_terms):
        bits = np.flatnonzero(token_words == w)
        mask = np.uint32(0)
        for b in bits:
            mask |= np.uint32(1) << np.uint32(b)
        m = len(bits)
        lut = np.array(
            [
                lgamma(eta[1, w] + c) - lgamma(eta[1, w])
                + lgamma(eta[0, w] + m - c) - lgamma(eta[0, w])
                for c in range(m + 1)
            ]
        )
        logp += lut[np.bitwise_count(codes & mask)]

    s0, s1 = eta[0].sum(), eta[1].sum()
    dlut = np.array(
        [
            -(lgamma(s1 + c) - lgamma(s1))
            - (lgamma(s0 + n_tokens - c) - lgamma(s0))
            for c in range(n_tokens + 1)
        ]
    )
    logp += dlut[np.bitwise_count(codes)]

    log_a0, log_a1 = np.log(alpha[0]), np.log(alpha[1])
    for d in range(n_docs):
        bits = np.flatnonzero(token_docs == d)
        if len(bits) == 1:
            bit = (codes >> np.uint32(int(bits[0]))) & 1
            logp += np.where(bit == 1, log_a1, log_a0)
            continue
        if len(bits) != 2:
            raise ValueError("enumeration supports docs of one or two tokens")
        i, j = (int(b) for b in bits)
        plut = np.array(
            [lgamma(alpha[0] + 2 - s) + lgamma(alpha[1] + s) for s in range(3)]
        )
        s = ((codes >> np.uint32(i)) & 1) + ((codes >> np.uint32(j)) & 1)
        logp += plut[s]

    logp -= logp.max()
    prob = np.exp(logp)
    prob /= prob.sum()
    return np.array(
        [float(prob[(codes >> np.uint32(i)) & 1 == 1].sum()) for i in range(n_tokens)]
    )


def reference_loess(x, y, span):
    """Tricube-weighted local lines via weighted lstsq on a raw design."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    r = max(int(np.ceil(span * n)), 2)
    out = np.empty(n)
    for i in range(n):
        dist = np.abs(x - x[i])
        radius = np.sort(dist)[r - 1]
        if radius <= 0:
            out[i] = y[dist == 0].mean()
            continue
        w = (1 - np.clip(dist / radius, 0, 1) ** 3) ** 3
        sw = np.sqrt(w)
        design = np.column_stack([np.ones(n), x - x[i]])
        active = sw > 0
        a = design[active] * sw[active, None]
        b = y[active] * sw[active]
        if np.linalg.matrix_rank(a) < 2:
            out[i] = np.average(y, weights=w)
        else:
            coef, *_ = np.linalg.lstsq(a, b, rcond=None)
            out[i] = coef[0]
    return out


def reference_ward(distances, squared=False):
    """Naive Lance-Williams agglomeration returning (merges, heights).

    Uses a dict-of-dicts structure and fresh cluster records instead of
    the package's in-place matrix updates.
    """
    d = np.array(distances, dtype=float)
    if squared:
        d = d**2
    k = d.shape[0]
    clusters = {i: {"node": i, "size": 1, "min_leaf": i} for i in range(k)}
    dist = {
        frozenset((i, j)): d[i, j] for i in range(k) for j in range(i + 1, k)
    }
    merges = []
    next_node = k
    next_key = k
    while len(clusters) > 1:
        keys = sorted(clusters)
        best = None
        for ai in range(len(keys)):
            for bi in range(ai + 1, len(keys)):
                a, b = keys[ai], keys[bi]
                pair = frozenset((a, b))
                lo, hi = sorted(
                    (clusters[a]["min_leaf"], clusters[b]["min_leaf"])
                )
                score = (dist[pair], lo, hi)
                if best is None or score < best[0]:
                    best = (score, a, b)
        (h, _, _), a, b = best
        if clusters[b]["min_leaf"] < clusters[a]["min_leaf"]:
            a, b = b, a
        height = float(np.sqrt(h)) if squared else float(h)
        merges.append((clusters[a]["node"], clusters[b]["node"], height))
        na, nb = clusters[a]["size"], clusters[b]["size"]
        new = {
            "node": next_node,
            "size": na + nb,
            "min_leaf": min(clusters[a]["min_leaf"], clusters[b]["min_leaf"]),
        }
        next_node += 1
        merged_key = next_key
        next_key += 1
        for c in list(clusters):
            if c in (a, b):
                continue
            nc = clusters[c]["size"]
            val = (
                (na + nc) * dist[frozenset((a, c))]
                + (nb + nc) * dist[frozenset((b, c))]
                - nc * dist[frozenset((a, b))]
            ) / (na + nb + nc)
            dist[frozenset((merged_key, c))] = val
        del clusters[a], clusters[b]
        clusters[merged_key] = new
    return merges


def reference_nrca(r):
    """Cell-by-cell NRCA for one year slice, spreadsheet style."""
    r = np.asarray(r, dtype=float)
    total = r.sum()
    out = np.zeros_like(r)
    for i in range(r.shape[0]):
        for j in range(r.shape[1]):
            out[i, j] = r[i, j] / total - r[i, :].sum() * r[:, j].sum() / total**2
    return out


def reference_jaccard(a, b):
    """Jaccard distance over index sets."""
    sa = {i for i, v in enumerate(a) if v}
    sb = {i for i, v in enumerate(b) if v}
    union = sa | sb
    if not union:
        return 0.0
    return 1.0 - len(sa & sb) / len(union)


def reference_haversine(lat1, lon1, lat2, lon2, radius=6371.0):
    """Great-circle distance via the spherical law of cosines."""
    p1, p2 = radians(lat1), radians(lat2)
    dl = radians(lon2 - lon1)
    inner = sin(p1) * sin(p2) + cos(p1) * cos(p2) * cos(dl)
    return radius * acos(min(1.0, max(-1.0, inner)))
