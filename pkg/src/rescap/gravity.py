"""Gravity model of pairwise research collaboration.

Collaboration weight between two countries is modeled as

    ln w = a ln P_m + a ln P_n + g ln d + l c + year effects + e

with P the countries' total fractional output that year, d the
great-circle distance between their capitals, and c the Jaccard
distance between their binary capability profiles. Pairs are unordered
and entered once, which forces the two output elasticities to share a
single coefficient; the design therefore carries one combined
ln P_m + ln P_n column whose estimate is reported for both.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from rescap.capability import CapabilityTensor, NrcaTensor, capability_distance
from rescap.collaboration import CollaborationTensor
from rescap.errors import ConfigError, RankDeficientError

logger = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0
SYM_PUBS_TERM = "ln_pubs_sym"
STAR_LEVELS = ((0.01, "***"), (0.05, "**"), (0.1, "*"))


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance between two (lat, lon) points in km."""
    for lat in (lat1, lat2):
        if not -90.0 <= lat <= 90.0:
            raise ValueError(f"latitude out of range: {lat}")
    for lon in (lon1, lon2):
        if not -180.0 <= lon <= 180.0:
            raise ValueError(f"longitude out of range: {lon}")
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlam = math.radians(lon2) - math.radians(lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


@dataclass
class GravityObservation:
    """One pair-year row of the gravity design."""

    year: int
    country_m: str
    country_n: str
    weight: float
    pubs_m: float
    pubs_n: float
    distance_km: float
    capability_dist: float


def build_observations(
    collab: CollaborationTensor,
    capability: CapabilityTensor,
    advantage: NrcaTensor,
    capitals: dict[str, tuple[float, float]],
    cluster: int,
    leave_one_out: bool = False,
    epsilon_w: Optional[float] = None,
) -> list[GravityObservation]:
    """Assemble pair-year observations for one cluster.

    Rows need positive collaboration weight (unless epsilon_w shifts all
    weights), positive output for both countries, and distinct capitals.
    The capability distance compares full binary profiles; leave_one_out
    drops the modeled cluster's own component first.
    """
    missing = sorted(set(collab.countries) - set(capitals))
    if missing:
        raise ConfigError(f"no capital coordinates for: {', '.join(missing)}")
    if not 0 <= cluster < collab.n_clusters:
        raise ValueError(f"cluster must be in [0, {collab.n_clusters}), got {cluster}")

    pub_totals = capability.country_year_totals()
    observations = []
    skipped = 0
    for year, j, m, n, weight in collab.iter_pairs():
        if j != cluster:
            continue
        if epsilon_w is not None:
            weight = weight + epsilon_w
        if weight <= 0:
            skipped += 1
            continue
        try:
            t_cap = capability.year_index(year)
            pubs_m = float(pub_totals[t_cap, capability.country_index(m)])
            pubs_n = float(pub_totals[t_cap, capability.country_index(n)])
            profile_m = advantage.profile(year, m)
            profile_n = advantage.profile(year, n)
        except KeyError:
            skipped += 1
            continue
        if pubs_m <= 0 or pubs_n <= 0:
            skipped += 1
            continue
        if leave_one_out:
            keep = np.arange(advantage.n_clusters) != cluster
            profile_m = profile_m[keep]
            profile_n = profile_n[keep]
        lat_m, lon_m = capitals[m]
        lat_n, lon_n = capitals[n]
        distance = haversine_km(lat_m, lon_m, lat_n, lon_n)
        if distance <= 0:
            skipped += 1
            continue
        observations.append(
            GravityObservation(
                year=year,
                country_m=m,
                country_n=n,
                weight=weight,
                pubs_m=pubs_m,
                pubs_n=pubs_n,
                distance_km=distance,
                capability_dist=capability_distance(profile_m, profile_n),
            )
        )
    if skipped:
        logger.info("gravity: skipped %d pair-years without usable data", skipped)
    return observations


def solve_least_squares(
    x: np.ndarray,
    y: np.ndarray,
    column_names: Optional[Sequence[str]] = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """QR least squares; returns (beta, inverse of X'X, residuals)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.shape[0]:
        raise ValueError("design must be 2-D with one response per row")
    n, p = x.shape
    if n < p:
        raise ValueError(f"need at least {p} observations, got {n}")
    q, r = np.linalg.qr(x)
    diag = np.abs(np.diag(r))
    tol = max(n, p) * np.finfo(float).eps * (diag.max() if diag.size else 0.0)
    bad = np.flatnonzero(diag <= tol)
    if bad.size:
        if column_names is not None:
            cols = [column_names[i] for i in bad]
        else:
            cols = [str(i) for i in bad]
        raise RankDeficientError(cols)
    beta = np.linalg.solve(r, q.T @ y)
    r_inv = np.linalg.solve(r, np.eye(p))
    inv_xtx = r_inv @ r_inv.T
    residuals = y - x @ beta
    return beta, inv_xtx, residuals


@dataclass
class RegressionResult:
    """Fitted gravity regression with inference columns."""

    terms: list[str]
    estimates: np.ndarray
    std_errors: np.ndarray
    t_values: np.ndarray
    p_values: np.ndarray
    stars: list[str]
    n_obs: int
    r_squared: float
    robust: bool
    baseline_year: int
    residuals: np.ndarray = field(repr=False)

    def coefficient(self, term: str) -> float:
        try:
            return float(self.estimates[self.terms.index(term)])
        except ValueError:
            raise KeyError(f"unknown term: {term}") from None

    def std_error(self, term: str) -> float:
        try:
            return float(self.std_errors[self.terms.index(term)])
        except ValueError:
            raise KeyError(f"unknown term: {term}") from None

    def summary_rows(self) -> list[dict]:
        rows = []
        for i, term in enumerate(self.terms):
            rows.append(
                {
                    "term": term,
                    "estimate": float(self.estimates[i]),
                    "std_error": float(self.std_errors[i]),
                    "t_value": float(self.t_values[i]),
                    "p_value": float(self.p_values[i]),
                    "stars": self.stars[i],
                }
            )
        return rows


def _star(p: float) -> str:
    for level, mark in STAR_LEVELS:
        if p < level:
            return mark
    return ""


def fit_ols_fixed_effects(
    observations: Sequence[GravityObservation],
    robust: bool = False,
) -> RegressionResult:
    """OLS on the log gravity equation with year fixed effects.

    Design: intercept, the combined ln P_m + ln P_n column, ln distance,
    capability distance, and one dummy per year except the earliest
    (the baseline). Standard errors are classical by default; robust
    switches to the HC1 heteroskedasticity-consistent estimate.
    """
    if len(observations) == 0:
        raise ValueError("no observations to fit")
    years = sorted({obs.year for obs in observations})
    baseline = years[0]
    dummy_years = years[1:]
    terms = ["const", SYM_PUBS_TERM, "ln_distance", "capability_dist"]
    terms += [f"year_{y}" for y in dummy_years]

    n = len(observations)
    p = len(terms)
    x = np.zeros((n, p))
    y = np.zeros(n)
    year_col = {yr: 4 + i for i, yr in enumerate(dummy_years)}
    for i, obs in enumerate(observations):
        x[i, 0] = 1.0
        x[i, 1] = math.log(obs.pubs_m) + math.log(obs.pubs_n)
        x[i, 2] = math.log(obs.distance_km)
        x[i, 3] = obs.capability_dist
        if obs.year != baseline:
            x[i, year_col[obs.year]] = 1.0
        y[i] = math.log(obs.weight)

    beta, inv_xtx, residuals = solve_least_squares(x, y, terms)
    dof = n - p
    if dof <= 0:
        raise ValueError(f"no residual degrees of freedom: n={n}, p={p}")
    ssr = float(residuals @ residuals)
    if robust:
        meat = (x * residuals[:, None] ** 2).T @ x
        cov = inv_xtx @ meat @ inv_xtx * (n / dof)
    else:
        cov = inv_xtx * (ssr / dof)
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore"):
        tvals = np.where(se > 0, beta / se, np.inf * np.sign(beta))
    pvals = 2 * stats.t.sf(np.abs(tvals), dof)
    sst = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - ssr / sst if sst > 0 else 0.0
    return RegressionResult(
        terms=terms,
        estimates=beta,
        std_errors=se,
        t_values=tvals,
        p_values=pvals,
        stars=[_star(pv) for pv in pvals],
        n_obs=n,
        r_squared=r_squared,
        robust=robust,
        baseline_year=baseline,
        residuals=residuals,
    )


_DISPLAY_ROWS = (
    (SYM_PUBS_TERM, "ln P_m"),
    (SYM_PUBS_TERM, "ln P_n"),
    ("ln_distance", "ln d"),
    ("capability_dist", "c"),
    ("const", "const"),
)


def format_gravity_table(results: dict[str, RegressionResult]) -> str:
    """Side-by-side text table of per-cluster fits.

    The shared output-elasticity estimate appears on both the ln P_m and
    ln P_n rows, since unordered pairs constrain the two to be equal.
    Year dummies are fitted but not displayed.
    """
    if not results:
        raise ValueError("no results to format")
    labels = list(results)
    width = max(18, *(len(lab) + 2 for lab in labels))

    def cell(result: RegressionResult, term: str) -> str:
        i = result.terms.index(term)
        return f"{result.estimates[i]:.3f} ({result.std_errors[i]:.3f}){result.stars[i]}"

    lines = ["".ljust(10) + "".join(lab.rjust(width) for lab in labels)]
    for term, shown in _DISPLAY_ROWS:
        row = shown.ljust(10)
        row += "".join(cell(results[lab], term).rjust(width) for lab in labels)
        lines.append(row)
    lines.append("N".ljust(10) + "".join(str(results[lab].n_obs).rjust(width) for lab in labels))
    lines.append(
        "R^2".ljust(10)
        + "".join(f"{results[lab].r_squared:.3f}".rjust(width) for lab in labels)
    )
    lines.append("")
    lines.append("classical standard errors in parentheses"
                 if not any(r.robust for r in results.values())
                 else "HC1 robust standard errors in parentheses")
    lines.append("* p<0.1, ** p<0.05, *** p<0.01")
    return "\n".join(lines)
