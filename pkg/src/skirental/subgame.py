"""Subgame-optimal behavioral policy for finite-horizon ski rental.

Bad days shrink the horizon: after observing ``b`` bad days, the policy plays
the worst-case optimal conditional stop probabilities of the (T - b)-day game.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from skirental.instance import SkiInstance, hindsight_cost
from skirental.policies import BehavioralPolicy
from skirental.worstcase import _check_sequence, _ipow, conditional_stop_probs


def always_continue(inst: SkiInstance) -> BehavioralPolicy:
    T = inst.horizon
    return BehavioralPolicy(T, inst.stop_cost, np.zeros((T + 1, T + 1)))


def subgame_policy(inst: SkiInstance) -> BehavioralPolicy:
    """Subgame-optimal policy built from horizon-reduced stop schedules."""
    T, B = inst.horizon, inst.stop_cost
    schedules = {h: conditional_stop_probs(inst.with_horizon(h)) for h in range(1, T + 1)}
    table = np.zeros((T + 1, T + 1))
    for t in range(1, T + 1):
        for k in range(1, t + 1):
            t_eff = T - (t - k)
            if t_eff <= B:
                continue
            table[t, k] = schedules[t_eff][k]
    return BehavioralPolicy(T, B, table)


def policy_cost_on_sequence(policy: BehavioralPolicy, sequence: Sequence[int]) -> float:
    """Expected cost of the randomized policy on a fixed sequence."""
    seq = _check_sequence(sequence, policy.horizon)
    B = policy.stop_cost
    survive = 1.0
    cost = 0.0
    k = 0
    for t, x in enumerate(seq, start=1):
        if not x:
            continue
        k += 1
        q = policy.good_stop[t, k]
        cost += survive * (q * B + (1.0 - q))
        survive *= 1.0 - q
    return cost


def policy_expected_cost(policy: BehavioralPolicy, p):
    """Exact expected cost when days are good i.i.d. with probability p.

    ``p`` may be a scalar or an array; the result has the same shape.
    """
    p_arr = np.asarray(p, dtype=float)
    if np.any(p_arr < 0) or np.any(p_arr > 1) or np.any(np.isnan(p_arr)):
        raise ValueError("p must lie in [0, 1]")
    T, B = policy.horizon, policy.stop_cost
    # alive[k]: probability of reaching the current day with k good days so far
    alive = np.zeros((T + 1,) + p_arr.shape)
    alive[0] = 1.0
    cost = np.zeros(p_arr.shape)
    for t in range(1, T + 1):
        nxt = np.zeros_like(alive)
        for k in range(t):
            m = alive[k]
            q = policy.good_stop[t, k + 1]
            cost = cost + m * p_arr * (q * B + (1.0 - q))
            nxt[k + 1] += m * p_arr * (1.0 - q)
            nxt[k] += m * (1.0 - p_arr)
        alive = nxt
    return float(cost) if cost.ndim == 0 else cost


def sg_benchmark_ratio(inst: SkiInstance) -> float:
    """max_X WC-OPT(X) / SG-OPT(X) in closed form."""
    T, B = inst.horizon, inst.stop_cost
    fl, cl = inst.floor_B, inst.ceil_B
    if inst.trivial:
        return 1.0
    q = (B - 1.0) / B
    if inst.short_horizon:
        return 1.0 / (1.0 - (T - B) / fl * _ipow(q, T - fl))
    return 1.0 / (1.0 - (cl - 1) / B * _ipow(q, cl - 1))


def sg_ratio_on_sequence(policy: BehavioralPolicy, sequence: Sequence[int]) -> float:
    cost = policy_cost_on_sequence(policy, sequence)
    opt = hindsight_cost(sum(sequence), policy.stop_cost)
    return 1.0 if opt == 0 else cost / opt


__all__ = [
    "BehavioralPolicy",
    "always_continue",
    "policy_cost_on_sequence",
    "policy_expected_cost",
    "sg_benchmark_ratio",
    "sg_ratio_on_sequence",
    "subgame_policy",
]
