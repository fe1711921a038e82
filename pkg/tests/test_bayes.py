import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skirental.bayes import (
    DiscretePrior,
    InfoSymmetricPolicy,
    always_continue_policy,
    bayes_opt_cost,
    bayes_opt_costs,
    bayes_threshold_policy,
    best_response,
    expected_pi_utility,
    is_thresholding,
    pi_utility,
    policy_cost,
    policy_costs,
    threshold_count_policy,
)
from skirental.instance import SkiInstance
from skirental.oracle import (
    all_policy_tables,
    bayes_optimum_dp,
    enumerate_best_response,
    enumerate_policy_cost,
)


def random_policy(rng, T, density=0.5):
    table = rng.random((T + 1, T + 1)) < density
    table[T] = False
    return InfoSymmetricPolicy(table)


@st.composite
def policies(draw, T):
    seed = draw(st.integers(0, 2**32 - 1))
    density = draw(st.floats(0.0, 1.0))
    return random_policy(np.random.default_rng(seed), T, density)


def reachable_good_states(policy, p):
    """(t, k) with positive probability of a good day t after k earlier good days."""
    T = policy.horizon
    alive = {0: 1.0}
    out = set()
    for t in range(1, T + 1):
        nxt = {}
        for k, m in alive.items():
            if m <= 0:
                continue
            if p > 0:
                out.add((t, k))
                if not policy.stop[t, k]:
                    nxt[k + 1] = nxt.get(k + 1, 0.0) + m * p
            if p < 1:
                nxt[k] = nxt.get(k, 0.0) + m * (1 - p)
        alive = nxt
    return out


def test_threshold_examples():
    inst = SkiInstance(9, 4.0)
    pol = bayes_threshold_policy(inst, 0.5)
    assert sorted({t for t, _ in pol.stop_states()}) == [1, 2, 3]
    assert all(pol.stop[t, k] for t in (1, 2, 3) for k in range(t))
    assert not bayes_threshold_policy(inst, 0.2).stop.any()
    for T, B, p in [(3, 3.0, 0.9), (4, 6.5, 1.0), (1, 1.5, 1.0)]:
        assert not bayes_threshold_policy(SkiInstance(T, B), p).stop.any()


def test_threshold_range_error():
    inst = SkiInstance(9, 4.0, prior_floor=0.01)
    with pytest.raises(ValueError):
        bayes_threshold_policy(inst, 0.005)
    with pytest.raises(ValueError):
        bayes_opt_cost(inst, 1.2)


def test_bayes_opt_cost_examples():
    inst = SkiInstance(9, 4.0)
    assert bayes_opt_cost(inst, 0.2) == pytest.approx(1.8, abs=1e-12)
    assert bayes_opt_cost(inst, 0.5) == pytest.approx(3.875, abs=1e-12)
    seam = 3 / 8
    assert bayes_opt_cost(inst, seam) == pytest.approx(9 * seam, abs=1e-12)
    assert bayes_opt_cost(inst, seam + 1e-9) == pytest.approx(9 * seam, abs=1e-7)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 14), st.floats(1.05, 16.0), st.floats(1e-3, 1.0))
def test_bayes_opt_cost_is_unrestricted_optimum(T, B, p):
    inst = SkiInstance(T, B)
    assert bayes_opt_cost(inst, p) == pytest.approx(bayes_optimum_dp(inst, p), abs=1e-9)
    assert policy_cost(bayes_threshold_policy(inst, p), inst, p).total == pytest.approx(
        bayes_opt_cost(inst, p), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12), st.floats(1.05, 16.0))
def test_opt_over_p_at_least_one(T, B):
    inst = SkiInstance(T, B)
    ps = np.linspace(1e-3, 1, 400)
    assert np.all(bayes_opt_costs(inst, ps) / ps >= 1 - 1e-12)


def test_policy_cost_examples():
    assert policy_cost(always_continue_policy(6), SkiInstance(6, 2.0), 0.35).total == pytest.approx(2.1)
    assert policy_cost(threshold_count_policy(0, 2), SkiInstance(2, 3.0), 0.5).total == pytest.approx(1.75)
    inst = SkiInstance(9, 4.0)
    assert policy_cost(bayes_threshold_policy(inst, 0.5), inst, 0.5).total == pytest.approx(3.875)


@settings(max_examples=150, deadline=None)
@given(st.data(), st.integers(1, 10), st.floats(1.05, 8.0), st.floats(0.0, 1.0))
def test_policy_cost_matches_enumeration(data, T, B, p):
    inst = SkiInstance(T, B)
    pol = data.draw(policies(T))
    br = policy_cost(pol, inst, p)
    assert br.total == pytest.approx(enumerate_policy_cost(pol, inst, p), abs=1e-9)
    assert br.total == pytest.approx(p * br.good[1, 0] + (1 - p) * br.bad[1, 0], abs=1e-12)
    assert policy_costs(pol, inst, np.array([p]))[0] == pytest.approx(br.total, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.data(), st.integers(1, 8), st.floats(1.05, 8.0))
def test_cost_is_low_degree_polynomial(data, T, B):
    inst = SkiInstance(T, B)
    pol = data.draw(policies(T))
    nodes = 0.5 - 0.5 * np.cos(np.pi * (np.arange(T + 1) + 0.5) / (T + 1))
    coef = np.polynomial.polynomial.polyfit(nodes, policy_costs(pol, inst, nodes), T)
    fresh = np.random.default_rng(0).random(20)
    predicted = np.polynomial.polynomial.polyval(fresh, coef)
    np.testing.assert_allclose(predicted, policy_costs(pol, inst, fresh), atol=1e-7)


def test_pi_utility_examples():
    inst = SkiInstance(9, 4.0)
    for p in (0.01, 0.3, 0.5, 0.77, 1.0):
        assert pi_utility(bayes_threshold_policy(inst, p), inst, p) == pytest.approx(1.0)
    for p in (0.01, 0.2, 3 / 8):
        assert pi_utility(always_continue_policy(9), inst, p) == pytest.approx(1.0)
    assert pi_utility(always_continue_policy(9), inst, 1.0) == pytest.approx(2.25)
    with pytest.raises(ValueError):
        pi_utility(always_continue_policy(9), inst, 1e-4)


@settings(max_examples=200, deadline=None)
@given(st.data(), st.integers(1, 10), st.floats(1.05, 12.0), st.floats(1e-3, 1.0))
def test_utility_bound(data, T, B, p):
    inst = SkiInstance(T, B)
    pol = data.draw(policies(T))
    u = pi_utility(pol, inst, p)
    assert 1 - 1e-9 <= u <= (B + 1) * (T + 1)


@settings(max_examples=200, deadline=None)
@given(st.data(), st.integers(1, 10), st.floats(1.05, 12.0), st.floats(1e-3, 1.0),
       st.floats(1e-4, 1.0), st.floats(-1.0, 1.0))
def test_cost_lipschitz(data, T, B, pa, eps, frac):
    inst = SkiInstance(T, B)
    pol = data.draw(policies(T))
    pb = min(1.0, max(0.0, pa + frac * eps / T**2))
    diff = abs(policy_cost(pol, inst, pa).total - policy_cost(pol, inst, pb).total)
    assert diff <= eps * (B + T) / T + 1e-12


def test_best_response_point_masses():
    for T, B in [(5, 2.0), (9, 4.0), (7, 1.5)]:
        inst = SkiInstance(T, B)
        for p in np.linspace(0.02, 1.0, 30):
            br = best_response(DiscretePrior.point(p), inst)
            ref = bayes_threshold_policy(inst, p)
            for t, k in reachable_good_states(ref, p):
                assert br.stop[t, k] == ref.stop[t, k], (T, B, p, t, k)


def test_best_response_p_one_stops_first_day():
    assert best_response(DiscretePrior.point(1.0), SkiInstance(6, 2.5)).stop[1, 0]


def test_best_response_two_point_prior():
    inst = SkiInstance(4, 2.0)
    prior = DiscretePrior(np.array([0.2, 0.9]), np.array([0.5, 0.5]))
    _, obj = enumerate_best_response(prior, inst)
    assert expected_pi_utility(best_response(prior, inst), prior, inst) == pytest.approx(obj, abs=1e-9)


def test_best_response_beats_every_table_t6():
    inst = SkiInstance(6, 2.5)
    rng = np.random.default_rng(5)
    tables = all_policy_tables(6)
    for _ in range(3):
        pts = np.sort(rng.choice(np.linspace(0.01, 1, 100), 3, replace=False))
        prior = DiscretePrior(pts, rng.dirichlet(np.ones(3)))
        best = expected_pi_utility(best_response(prior, inst), prior, inst)
        opt = np.array([bayes_optimum_dp(inst, p) for p in pts])
        for table in tables[rng.choice(len(tables), 400, replace=False)]:
            pol = InfoSymmetricPolicy(table)
            objective = sum(w * policy_cost(pol, inst, p).total / o
                            for p, w, o in zip(pts, prior.weights, opt))
            assert best <= objective + 1e-9


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.floats(1.05, 9.0), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_best_responses_threshold(T, B, n, seed):
    rng = np.random.default_rng(seed)
    pts = np.unique(np.round(rng.uniform(1e-3, 1, n), 6))
    prior = DiscretePrior(pts, rng.dirichlet(np.ones(pts.size)))
    assert is_thresholding(best_response(prior, SkiInstance(T, B)))


def test_is_thresholding_examples():
    inst = SkiInstance(9, 4.0)
    assert is_thresholding(bayes_threshold_policy(inst, 0.6))
    assert not is_thresholding(InfoSymmetricPolicy.from_states(4, [(3, 1)]))
    assert is_thresholding(InfoSymmetricPolicy.from_states(4, [(3, 1), (3, 2)]))


def test_policy_table_invariants():
    table = np.zeros((4, 4), dtype=bool)
    table[3, 0] = True
    with pytest.raises(ValueError):
        InfoSymmetricPolicy(table)
    pol = InfoSymmetricPolicy.from_states(3, [(2, 1)])
    assert pol.decision(2, 1, True) == "S"
    assert pol.decision(2, 1, False) == "C"
    with pytest.raises(ValueError):
        pol.decision(2, 2, True)


def test_policy_json_round_trip():
    pol = bayes_threshold_policy(SkiInstance(9, 4.0), 0.55)
    data = pol.to_dict()
    assert data["T"] == 9 and [1, 0, "S"] in data["rows"]
    assert InfoSymmetricPolicy.from_json(pol.to_json()) == pol


def test_prior_validation():
    with pytest.raises(ValueError):
        DiscretePrior(np.array([]), np.array([]))
    with pytest.raises(ValueError):
        DiscretePrior(np.array([0.2, 0.2]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        DiscretePrior(np.array([0.2, 0.3]), np.array([0.5, 0.6]))
    prior = DiscretePrior(np.array([0.7, 0.2]), np.array([0.25, 0.75]))
    assert list(prior.support) == [0.2, 0.7] and list(prior.weights) == [0.75, 0.25]
    with pytest.raises(ValueError):
        best_response(DiscretePrior.point(1e-4), SkiInstance(4, 2.0))
