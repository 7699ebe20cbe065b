import math

import numpy as np
import pytest

import helpers
from rescap.capability import CapabilityTensor, nrca
from rescap.collaboration import CollaborationTensor
from rescap.errors import ConfigError, RankDeficientError
from rescap.gravity import (
    EARTH_RADIUS_KM,
    SYM_PUBS_TERM,
    GravityObservation,
    _star,
    build_observations,
    fit_ols_fixed_effects,
    format_gravity_table,
    haversine_km,
    solve_least_squares,
)
from rescap.synth import generate_gravity_data


def test_haversine_frozen_values():
    assert haversine_km(0.0, 0.0, 0.0, 180.0) == pytest.approx(
        math.pi * EARTH_RADIUS_KM, abs=1e-9
    )
    assert haversine_km(10.0, 20.0, 10.0, 20.0) == 0.0
    assert haversine_km(0.0, 0.0, 0.0, 90.0) == pytest.approx(
        math.pi / 2 * EARTH_RADIUS_KM, abs=1e-9
    )
    assert haversine_km(90.0, 0.0, -90.0, 0.0) == pytest.approx(
        math.pi * EARTH_RADIUS_KM, abs=1e-9
    )


def test_haversine_matches_law_of_cosines(rng):
    for _ in range(200):
        lat1, lat2 = rng.uniform(-80, 80, size=2)
        lon1, lon2 = rng.uniform(-180, 180, size=2)
        assert haversine_km(lat1, lon1, lat2, lon2) == pytest.approx(
            helpers.reference_haversine(lat1, lon1, lat2, lon2), abs=1e-6
        )


def test_haversine_symmetry(rng):
    lat1, lon1, lat2, lon2 = 48.85, 2.35, 37.57, 126.98
    assert haversine_km(lat1, lon1, lat2, lon2) == pytest.approx(
        haversine_km(lat2, lon2, lat1, lon1)
    )


def test_haversine_range_validation():
    with pytest.raises(ValueError, match="latitude"):
        haversine_km(91.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError, match="latitude"):
        haversine_km(0.0, 0.0, -90.5, 0.0)
    with pytest.raises(ValueError, match="longitude"):
        haversine_km(0.0, 181.0, 0.0, 0.0)


def test_solve_least_squares_matches_numpy(rng):
    for _ in range(20):
        n, p = int(rng.integers(10, 50)), int(rng.integers(2, 6))
        x = rng.normal(size=(n, p))
        y = rng.normal(size=n)
        beta, inv_xtx, residuals = solve_least_squares(x, y)
        expected, *_ = np.linalg.lstsq(x, y, rcond=None)
        np.testing.assert_allclose(beta, expected, atol=1e-10)
        np.testing.assert_allclose(inv_xtx, np.linalg.inv(x.T @ x), atol=1e-8)
        np.testing.assert_allclose(residuals, y - x @ beta, atol=1e-12)


def test_solve_least_squares_rank_deficiency_names_columns(rng):
    x = rng.normal(size=(30, 2))
    design = np.column_stack([x[:, 0], x[:, 1], x[:, 0] + x[:, 1]])
    with pytest.raises(RankDeficientError) as err:
        solve_least_squares(design, rng.normal(size=30), ["a", "b", "a_plus_b"])
    assert "a_plus_b" in str(err.value)
    with pytest.raises(ValueError, match="observations"):
        solve_least_squares(np.ones((2, 3)), np.ones(2))
    with pytest.raises(ValueError, match="2-D"):
        solve_least_squares(np.ones(3), np.ones(3))


def test_star_thresholds():
    assert _star(0.005) == "***"
    assert _star(0.01) == "**"
    assert _star(0.03) == "**"
    assert _star(0.05) == "*"
    assert _star(0.07) == "*"
    assert _star(0.1) == ""
    assert _star(0.5) == ""


def test_fit_recovers_noiseless_coefficients():
    observations, truth = generate_gravity_data(seed=11, n_obs=600, n_countries=8)
    result = fit_ols_fixed_effects(observations)
    assert result.coefficient(SYM_PUBS_TERM) == pytest.approx(
        truth["pubs_elasticity"], abs=1e-8
    )
    assert result.coefficient("ln_distance") == pytest.approx(
        truth["distance_elasticity"], abs=1e-8
    )
    assert result.coefficient("capability_dist") == pytest.approx(
        truth["capability_penalty"], abs=1e-8
    )
    assert result.coefficient("const") == pytest.approx(0.0, abs=1e-8)
    for year, effect in truth["year_effects"].items():
        if year == result.baseline_year:
            continue
        assert result.coefficient(f"year_{year}") == pytest.approx(effect, abs=1e-8)
    assert result.r_squared > 0.999999


def test_fit_terms_and_baseline():
    observations, _ = generate_gravity_data(seed=3, n_obs=70, n_countries=6, years=(1990, 1994))
    result = fit_ols_fixed_effects(observations)
    assert result.baseline_year == 1990
    assert result.terms[:4] == ["const", SYM_PUBS_TERM, "ln_distance", "capability_dist"]
    assert "year_1990" not in result.terms
    assert {f"year_{y}" for y in (1991, 1992, 1993, 1994)} <= set(result.terms)
    assert result.n_obs == 70


def test_classical_standard_errors_match_direct_formula():
    observations, _ = generate_gravity_data(
        seed=5, n_obs=300, n_countries=7, noise_sigma=0.4
    )
    result = fit_ols_fixed_effects(observations)

    years = sorted({o.year for o in observations})
    x = np.column_stack(
        [
            np.ones(len(observations)),
            [math.log(o.pubs_m) + math.log(o.pubs_n) for o in observations],
            [math.log(o.distance_km) for o in observations],
            [o.capability_dist for o in observations],
        ]
        + [[1.0 if o.year == yr else 0.0 for o in observations] for yr in years[1:]]
    )
    y = np.array([math.log(o.weight) for o in observations])
    beta = np.linalg.solve(x.T @ x, x.T @ y)
    resid = y - x @ beta
    dof = x.shape[0] - x.shape[1]
    cov = np.linalg.inv(x.T @ x) * (resid @ resid / dof)
    np.testing.assert_allclose(result.estimates, beta, atol=1e-8)
    np.testing.assert_allclose(result.std_errors, np.sqrt(np.diag(cov)), atol=1e-8)

    from scipy import stats

    np.testing.assert_allclose(
        result.p_values,
        2 * stats.t.sf(np.abs(beta / np.sqrt(np.diag(cov))), dof),
        atol=1e-10,
    )


def test_hc1_standard_errors_match_sandwich():
    observations, _ = generate_gravity_data(
        seed=6, n_obs=250, n_countries=7, noise_sigma=0.5
    )
    plain = fit_ols_fixed_effects(observations, robust=False)
    robust = fit_ols_fixed_effects(observations, robust=True)
    np.testing.assert_allclose(plain.estimates, robust.estimates, atol=1e-12)
    assert robust.robust and not plain.robust

    years = sorted({o.year for o in observations})
    x = np.column_stack(
        [
            np.ones(len(observations)),
            [math.log(o.pubs_m) + math.log(o.pubs_n) for o in observations],
            [math.log(o.distance_km) for o in observations],
            [o.capability_dist for o in observations],
        ]
        + [[1.0 if o.year == yr else 0.0 for o in observations] for yr in years[1:]]
    )
    y = np.array([math.log(o.weight) for o in observations])
    inv_xtx = np.linalg.inv(x.T @ x)
    beta = inv_xtx @ x.T @ y
    resid = y - x @ beta
    n, p = x.shape
    meat = x.T @ np.diag(resid**2) @ x
    cov = n / (n - p) * inv_xtx @ meat @ inv_xtx
    np.testing.assert_allclose(robust.std_errors, np.sqrt(np.diag(cov)), atol=1e-8)
    # heteroskedasticity-free noise: both estimators land close together
    assert np.all(robust.std_errors[:4] < 2 * plain.std_errors[:4])


def test_fit_validation():
    with pytest.raises(ValueError, match="no observations"):
        fit_ols_fixed_effects([])
    # 5 rows against 5 parameters leaves no residual degrees of freedom
    observations, _ = generate_gravity_data(seed=8, n_obs=5, n_countries=4, years=(2000, 2001))
    with pytest.raises(ValueError, match="degrees of freedom"):
        fit_ols_fixed_effects(observations)


def _pair_fixture():
    years = np.array([2000, 2001])
    countries = ["AA", "BB", "CC"]
    cap = np.zeros((2, 3, 2))
    cap[:, 0] = [3.0, 1.0]
    cap[:, 1] = [1.0, 3.0]
    cap[:, 2] = [2.0, 2.0]
    capability = CapabilityTensor(years=years, countries=countries, values=cap)
    advantage = nrca(capability)
    collab = np.zeros((2, 2, 3, 3))
    for t in range(2):
        for j in range(2):
            collab[t, j] = [[0.0, 0.4, 0.0], [0.4, 0.0, 0.2], [0.0, 0.2, 0.0]]
    collab_tensor = CollaborationTensor(years=years, countries=countries, values=collab)
    capitals = {"AA": (0.0, 0.0), "BB": (0.0, 90.0), "CC": (45.0, -60.0)}
    return collab_tensor, capability, advantage, capitals


def test_build_observations_filters_and_contents():
    collab, capability, advantage, capitals = _pair_fixture()
    obs = build_observations(collab, capability, advantage, capitals, cluster=0)
    # AA-CC pairs carry zero weight and drop out; the rest survive
    assert [(o.year, o.country_m, o.country_n) for o in obs] == [
        (2000, "AA", "BB"),
        (2000, "BB", "CC"),
        (2001, "AA", "BB"),
        (2001, "BB", "CC"),
    ]
    first = obs[0]
    assert first.weight == pytest.approx(0.4)
    assert first.pubs_m == pytest.approx(4.0)
    assert first.pubs_n == pytest.approx(4.0)
    assert first.distance_km == pytest.approx(math.pi / 2 * EARTH_RADIUS_KM)
    # AA is advantaged in cluster 0 only, BB in cluster 1 only
    assert first.capability_dist == pytest.approx(1.0)


def test_build_observations_epsilon_w_keeps_zero_rows():
    collab, capability, advantage, capitals = _pair_fixture()
    obs = build_observations(
        collab, capability, advantage, capitals, cluster=0, epsilon_w=1e-6
    )
    assert len(obs) == 6
    zero_pair = [o for o in obs if {o.country_m, o.country_n} == {"AA", "CC"}]
    assert all(o.weight == pytest.approx(1e-6) for o in zero_pair)


def test_build_observations_leave_one_out():
    collab, capability, advantage, capitals = _pair_fixture()
    # profiles: AA (True, False), BB (False, True), CC (False, False); epsilon
    # keeps the zero-weight AA-CC rows so the differing pair is observable
    kept = build_observations(
        collab, capability, advantage, capitals, cluster=0, epsilon_w=1e-6
    )
    dropped = build_observations(
        collab, capability, advantage, capitals, cluster=0, epsilon_w=1e-6,
        leave_one_out=True,
    )

    def pair(rows, m, n):
        return [o for o in rows if (o.country_m, o.country_n) == (m, n)][0]

    assert pair(kept, "AA", "CC").capability_dist == pytest.approx(1.0)
    # with cluster 0 removed, AA and CC are both empty profiles
    assert pair(dropped, "AA", "CC").capability_dist == pytest.approx(0.0)
    assert pair(kept, "AA", "BB").capability_dist == pytest.approx(1.0)
    assert pair(dropped, "AA", "BB").capability_dist == pytest.approx(1.0)


def test_build_observations_missing_capitals():
    collab, capability, advantage, capitals = _pair_fixture()
    del capitals["BB"]
    with pytest.raises(ConfigError, match="BB"):
        build_observations(collab, capability, advantage, capitals, cluster=0)
    with pytest.raises(ValueError, match="cluster"):
        build_observations(
            collab, capability, advantage, {**capitals, "BB": (0.0, 90.0)}, cluster=9
        )


def test_result_lookup_and_summary_rows():
    observations, _ = generate_gravity_data(seed=12, n_obs=150, n_countries=6)
    result = fit_ols_fixed_effects(observations)
    rows = result.summary_rows()
    assert [r["term"] for r in rows] == result.terms
    assert rows[1]["estimate"] == result.coefficient(SYM_PUBS_TERM)
    with pytest.raises(KeyError, match="nope"):
        result.coefficient("nope")
    with pytest.raises(KeyError, match="nope"):
        result.std_error("nope")


def test_format_gravity_table():
    observations, _ = generate_gravity_data(seed=13, n_obs=200, n_countries=6)
    result = fit_ols_fixed_effects(observations)
    text = format_gravity_table({"materials": result, "optics": result})
    lines = text.splitlines()
    assert "materials" in lines[0] and "optics" in lines[0]
    # the shared elasticity shows up identically on both publication rows
    pm = next(line for line in lines if line.startswith("ln P_m"))
    pn = next(line for line in lines if line.startswith("ln P_n"))
    assert pm.split()[2:] == pn.split()[2:]
    assert any(line.startswith("N") for line in lines)
    assert any(line.startswith("R^2") for line in lines)
    assert "classical standard errors" in text
    assert "* p<0.1" in text
    robust = fit_ols_fixed_effects(observations, robust=True)
    assert "HC1 robust" in format_gravity_table({"all": robust})
    with pytest.raises(ValueError):
        format_gravity_table({})
