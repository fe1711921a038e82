import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from skirental.game_core import (
    MixedStrategy,
    PayoffTable,
    certify_minmax,
    eps_nash_gap,
    expected_payoff,
)
from skirental.instance import SkiInstance
from skirental.oracle import brute_minimax_reduced, reduced_table
from skirental.worstcase import adversary_support, worst_case_mixture

PENNIES = PayoffTable(np.array([[1.0, 0.0], [0.0, 1.0]]), 1.0)


def test_point_masses():
    table = PayoffTable(np.array([[7.0, 1.0], [2.0, 3.0]]), 7.0)
    assert expected_payoff(MixedStrategy.point(2, 0), MixedStrategy.point(2, 0), table) == 7.0


def test_matching_pennies_uniform():
    u = MixedStrategy.uniform(2)
    assert expected_payoff(u, u, PENNIES) == pytest.approx(0.5)
    assert eps_nash_gap(u, u, PENNIES) == pytest.approx((0.0, 0.0), abs=1e-12)


def test_matching_pennies_pure_gaps():
    # at a pure profile exactly one side has a deviation worth 1
    a = MixedStrategy.point(2, 0)
    b = MixedStrategy.point(2, 1)
    assert eps_nash_gap(a, a, PENNIES) == (1.0, 0.0)
    assert eps_nash_gap(a, b, PENNIES) == (0.0, 1.0)


def test_reduced_table_hand_value():
    # u(A^0, F^1) = 2 and u(A^3, F^1) = 1 at T=3, B=2
    inst = SkiInstance(3, 2.0)
    table = PayoffTable.from_matrix(reduced_table(inst))
    alg = MixedStrategy(np.array([1 / 3, 0, 0, 2 / 3]))
    adv = MixedStrategy.point(3, 0)
    assert expected_payoff(alg, adv, table) == pytest.approx(4 / 3, abs=1e-12)


def test_closed_form_pair_is_equilibrium():
    inst = SkiInstance(3, 2.0)
    table = PayoffTable.from_matrix(reduced_table(inst))
    alg = MixedStrategy(worst_case_mixture(inst).dense())
    _, _, oracle_adv = brute_minimax_reduced(inst)
    alg_gap, adv_gap = eps_nash_gap(alg, oracle_adv, table)
    assert alg_gap <= 1e-9 and adv_gap <= 1e-9
    # the oracle's adversary only uses the predicted support
    used = {k + 1 for k, w in enumerate(oracle_adv.weights) if w > 1e-9}
    assert used <= set(adversary_support(inst))


def test_oracle_mixtures_have_zero_gap():
    for T, B in [(2, 1.5), (4, 2.5), (6, 3.0)]:
        inst = SkiInstance(T, B)
        _, rows, cols = brute_minimax_reduced(inst)
        table = PayoffTable.from_matrix(reduced_table(inst))
        assert max(eps_nash_gap(rows, cols, table)) <= 1e-9


def test_certify_minmax():
    assert certify_minmax(0.0) == 0.0
    assert certify_minmax(0.01) == pytest.approx(0.02)
    assert certify_minmax(0.5) == 1.0
    with pytest.raises(ValueError):
        certify_minmax(-1e-3)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        expected_payoff(MixedStrategy.uniform(3), MixedStrategy.uniform(2), PENNIES)
    with pytest.raises(ValueError):
        eps_nash_gap(MixedStrategy.uniform(2), MixedStrategy.uniform(3), PENNIES)


def test_validation():
    with pytest.raises(ValueError):
        MixedStrategy(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        MixedStrategy(np.array([1.5, -0.5]))
    with pytest.raises(ValueError):
        PayoffTable(np.array([[2.0]]), 1.0)
    with pytest.raises(ValueError):
        PayoffTable(np.array([[np.inf]]), np.inf)


def _simplex(n):
    return arrays(float, n, elements=st.floats(0.0, 1.0)).filter(lambda w: w.sum() > 1e-3)


@st.composite
def games(draw):
    r = draw(st.integers(1, 5))
    c = draw(st.integers(1, 5))
    u = draw(arrays(float, (r, c), elements=st.floats(0.0, 10.0)))
    return PayoffTable(u, 10.0), draw(_simplex(r)), draw(_simplex(c))


@settings(max_examples=200, deadline=None)
@given(games(), st.floats(0.1, 10.0))
def test_payoff_range_and_bilinearity(game, scale):
    table, a, b = game
    alg = MixedStrategy.normalized(a)
    adv = MixedStrategy.normalized(b)
    v = expected_payoff(alg, adv, table)
    assert table.u.min() - 1e-9 <= v <= table.u.max() + 1e-9
    # scaling raw weights then renormalizing leaves the payoff unchanged
    v2 = expected_payoff(MixedStrategy.normalized(a * scale), MixedStrategy.normalized(b), table)
    assert v2 == pytest.approx(v, rel=1e-9, abs=1e-9)
    gaps = eps_nash_gap(alg, adv, table)
    assert min(gaps) >= 0
