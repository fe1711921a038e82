"""Bayesian analysis for i.i.d. weather: costs, utilities and best responses.

Policies here are information-symmetric and deterministic: the decision on
day t depends only on the number k of good days among days 1..t-1 and on
today's weather. Bad days always continue, and so does the last day.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from skirental.instance import SkiInstance
from skirental.policies import (
    DiscretePrior,
    InfoSymmetricPolicy,
    always_continue_policy,
    threshold_count_policy,
)

# relative slack under which stop and continue count as tied (ties stop)
TIE_TOL = 1e-12


@dataclass(frozen=True)
class CostBreakdown:
    """Expected cost and continuation costs c(k, t, w) at a single p.

    ``good[t, k]`` / ``bad[t, k]`` hold the expected cost from day t onward
    given k good days among days 1..t-1 and today's weather.
    """

    total: float
    good: np.ndarray = field(repr=False)
    bad: np.ndarray = field(repr=False)


def _check_p(p, lo: float = 0.0) -> np.ndarray:
    p_arr = np.asarray(p, dtype=float)
    if np.any(np.isnan(p_arr)) or np.any(p_arr < lo) or np.any(p_arr > 1):
        raise ValueError(f"probability outside [{lo}, 1]: {p}")
    return p_arr


def _continuation(stop: np.ndarray, B: float, p: np.ndarray):
    """Backward DP; returns (good, bad) with shape (T+1, T+1, *p.shape)."""
    T = stop.shape[0] - 1
    shape = (T + 2, T + 1) + p.shape
    good = np.zeros(shape)
    bad = np.zeros(shape)
    good[T, :T] = 1.0
    for t in range(T - 1, 0, -1):
        ks = np.arange(t)
        cont = 1.0 + p * good[t + 1, ks + 1] + (1.0 - p) * bad[t + 1, ks + 1]
        mask = stop[t, :t].reshape((t,) + (1,) * p.ndim)
        good[t, :t] = np.where(mask, B, cont)
        bad[t, :t] = p * good[t + 1, ks] + (1.0 - p) * bad[t + 1, ks]
    return good[: T + 1], bad[: T + 1]


def policy_cost(policy: InfoSymmetricPolicy, inst: SkiInstance, p: float) -> CostBreakdown:
    """Expected cost A(p) of a policy, with the full continuation-cost table."""
    if policy.horizon != inst.horizon:
        raise ValueError("policy horizon does not match the instance")
    p_arr = _check_p(p)
    if p_arr.ndim != 0:
        raise ValueError("policy_cost takes a scalar p; use policy_costs for arrays")
    good, bad = _continuation(policy.stop, inst.stop_cost, p_arr)
    pv = float(p_arr)
    total = pv * good[1, 0] + (1.0 - pv) * bad[1, 0]
    return CostBreakdown(float(total), good, bad)


def policy_costs(policy: InfoSymmetricPolicy, inst: SkiInstance, ps) -> np.ndarray:
    """Vectorized A(p) over an array of probabilities."""
    if policy.horizon != inst.horizon:
        raise ValueError("policy horizon does not match the instance")
    p_arr = _check_p(ps)
    good, bad = _continuation(policy.stop, inst.stop_cost, p_arr)
    return p_arr * good[1, 0] + (1.0 - p_arr) * bad[1, 0]


def last_stop_day(inst: SkiInstance, p: float) -> int:
    """Largest day index on which the Bayesian optimum stops on a good day (0 if never)."""
    T, B = inst.horizon, inst.stop_cost
    if inst.trivial:
        return 0
    cap = min(math.ceil(T - B), T - 1)
    k = 0
    for t in range(1, cap + 1):
        if p * (T - t) >= (B - 1.0) * (1.0 - TIE_TOL):
            k = t
        else:
            break
    return k


def bayes_threshold_policy(inst: SkiInstance, p: float) -> InfoSymmetricPolicy:
    """Bayesian-optimal policy for known p: stop on good days through ``last_stop_day``."""
    _check_p(p, inst.prior_floor)
    T = inst.horizon
    table = np.zeros((T + 1, T + 1), dtype=bool)
    k = last_stop_day(inst, float(p))
    table[1 : k + 1] = True
    return InfoSymmetricPolicy(table)


def bayes_opt_cost(inst: SkiInstance, p: float) -> float:
    """Bayesian optimal expected cost OPT_p(p) for p in [delta, 1]."""
    _check_p(p, inst.prior_floor)
    p = float(p)
    T, B = inst.horizon, inst.stop_cost
    k = last_stop_day(inst, p)
    if k == 0:
        return T * p
    miss = (1.0 - p) ** k
    return B * (1.0 - miss) + miss * p * (T - k)


def bayes_opt_costs(inst: SkiInstance, ps) -> np.ndarray:
    p_arr = _check_p(ps, inst.prior_floor)
    return np.vectorize(lambda q: bayes_opt_cost(inst, q), otypes=[float])(p_arr)


def pi_utility(policy: InfoSymmetricPolicy, inst: SkiInstance, p: float) -> float:
    """Prior-independent payoff A(p) / OPT_p(p)."""
    _check_p(p, inst.prior_floor)
    return policy_cost(policy, inst, p).total / bayes_opt_cost(inst, p)


def pi_utilities(policy: InfoSymmetricPolicy, inst: SkiInstance, ps,
                 opt: np.ndarray | None = None) -> np.ndarray:
    """Vectorized ``pi_utility``; pass precomputed OPT values to skip recomputation."""
    p_arr = _check_p(ps, inst.prior_floor)
    if opt is None:
        opt = bayes_opt_costs(inst, p_arr)
    return policy_costs(policy, inst, p_arr) / opt


def expected_pi_utility(policy: InfoSymmetricPolicy, prior: DiscretePrior,
                        inst: SkiInstance) -> float:
    return float(prior.weights @ pi_utilities(policy, inst, prior.support))


def best_response(prior: DiscretePrior, inst: SkiInstance,
                  opt: np.ndarray | None = None) -> InfoSymmetricPolicy:
    """Backwards induction minimizing E_{p~prior}[A(p) / OPT_p(p)].

    Each good-day state compares the prior-weighted normalized stop cost with
    the continuation cost; near-ties stop, states of zero weight continue.
    """
    T, B = inst.horizon, inst.stop_cost
    p = prior.support
    if np.any(p < inst.prior_floor):
        raise ValueError("prior support below the instance prior floor")
    if inst.trivial:
        # stopping costs B >= T, never less than renting to the end
        return always_continue_policy(T)
    if opt is None:
        opt = bayes_opt_costs(inst, p)
    base = prior.weights / opt
    q = 1.0 - p
    # pw[j] = p^j, qw[j] = (1-p)^j
    pw = np.cumprod(np.vstack([np.ones_like(p), np.broadcast_to(p, (T, p.size))]), axis=0)
    qw = np.cumprod(np.vstack([np.ones_like(p), np.broadcast_to(q, (T, p.size))]), axis=0)

    table = np.zeros((T + 1, T + 1), dtype=bool)
    good = np.ones((T + 1, p.size))
    bad = np.zeros((T + 1, p.size))
    for t in range(T - 1, 0, -1):
        cont = 1.0 + p * good[1 : t + 1] + q * bad[1 : t + 1]
        # Pr[(k, t, good) | p] up to the binomial factor shared by all p
        w = base * pw[1 : t + 1] * qw[t - 1 :: -1][:t]
        mass = w.sum(axis=1)
        stop_val = B * mass
        cont_val = np.einsum("ij,ij->i", w, cont)
        decide = (mass > 0) & (stop_val <= cont_val + TIE_TOL * np.maximum(stop_val, cont_val))
        table[t, :t] = decide
        # rows 0..t-1 of day t only read rows 0..t of day t+1
        bad[:t] = p * good[:t] + q * bad[:t]
        good[:t] = np.where(decide[:, None], B, cont)
    return InfoSymmetricPolicy(table)


def is_thresholding(policy: InfoSymmetricPolicy) -> bool:
    """Stopping at count k on day t implies stopping at count k+1 on day t."""
    T = policy.horizon
    for t in range(2, T + 1):
        row = policy.stop[t, :t]
        if np.any(row[:-1] & ~row[1:]):
            return False
    return True


__all__ = [
    "TIE_TOL",
    "CostBreakdown",
    "DiscretePrior",
    "InfoSymmetricPolicy",
    "always_continue_policy",
    "bayes_opt_cost",
    "bayes_opt_costs",
    "bayes_threshold_policy",
    "best_response",
    "expected_pi_utility",
    "is_thresholding",
    "last_stop_day",
    "pi_utilities",
    "pi_utility",
    "policy_cost",
    "policy_costs",
    "threshold_count_policy",
]
