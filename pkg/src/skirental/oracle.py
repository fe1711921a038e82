"""Brute-force ground truth for small instances.

Nothing here imports the solver modules: costs come from enumerating weather
sequences, best responses from enumerating decision tables, and game values
from a linear program whose answer is then checked by its duality gap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog

from skirental.game_core import MixedStrategy, PayoffTable, eps_nash_gap
from skirental.instance import SkiInstance
from skirental.policies import BehavioralPolicy, DiscretePrior, InfoSymmetricPolicy

MAX_ENUM_T = 20
MAX_BR_T = 6
MAX_REDUCED_T = 12
MAX_DENSE = 200
CERT_TOL = 1e-7


@dataclass(frozen=True)
class DenseGame:
    payoff: PayoffTable
    row_labels: tuple
    col_labels: tuple

    def __post_init__(self):
        rows, cols = self.payoff.shape
        if len(self.row_labels) != rows or len(self.col_labels) != cols:
            raise ValueError("label counts do not match the payoff table")
        if len(set(self.row_labels)) != rows or len(set(self.col_labels)) != cols:
            raise ValueError("labels must be unique")


@lru_cache(maxsize=32)
def all_sequences(T: int) -> np.ndarray:
    """Every 0/1 weather sequence of length T as rows of a (2^T, T) array."""
    if T > MAX_ENUM_T:
        raise ValueError(f"T={T} exceeds the enumeration limit {MAX_ENUM_T}")
    codes = np.arange(2 ** T, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(T - 1, -1, -1)) & 1
    bits = bits.astype(np.int8)
    bits.setflags(write=False)
    return bits


def sequence_probs(T: int, p: float) -> np.ndarray:
    seqs = all_sequences(T)
    goods = seqs.sum(axis=1)
    return p ** goods * (1.0 - p) ** (T - goods)


def _table_costs(stop: np.ndarray, seqs: np.ndarray, B: float) -> np.ndarray:
    """Cost of deterministic tables on each sequence.

    ``stop`` has shape (n, T+1, T+1); the result has shape (n, len(seqs)).
    """
    n = stop.shape[0]
    T = seqs.shape[1]
    cost = np.zeros((n, seqs.shape[0]))
    alive = np.ones((n, seqs.shape[0]), dtype=bool)
    count = np.zeros(seqs.shape[0], dtype=np.int64)
    for t in range(1, T + 1):
        good = seqs[:, t - 1].astype(bool)
        stops = stop[:, t, count] & good[None, :] & alive
        rents = ~stops & good[None, :] & alive
        cost += np.where(stops, B, 0.0) + np.where(rents, 1.0, 0.0)
        alive &= ~stops
        count = count + good
    return cost


def policy_sequence_cost(policy: InfoSymmetricPolicy, sequence, stop_cost: float) -> float:
    seq = np.asarray([sequence], dtype=np.int8)
    return float(_table_costs(policy.stop[None], seq, stop_cost)[0, 0])


def enumerate_policy_cost(policy: InfoSymmetricPolicy, inst: SkiInstance, p: float) -> float:
    """Expected cost by summing over all 2^T sequences."""
    T = inst.horizon
    if T > MAX_ENUM_T:
        raise ValueError(f"T={T} exceeds the enumeration limit {MAX_ENUM_T}")
    if policy.horizon != T:
        raise ValueError("policy horizon does not match the instance")
    costs = _table_costs(policy.stop[None], all_sequences(T), inst.stop_cost)[0]
    return float(costs @ sequence_probs(T, p))


def _behavioral_sequence_cost(policy: BehavioralPolicy, seq) -> float:
    B = policy.stop_cost
    survive, cost, k = 1.0, 0.0, 0
    for t, x in enumerate(seq, start=1):
        if x:
            k += 1
            q = policy.good_stop[t, k]
            cost += survive * (q * B + 1.0 - q)
            survive *= 1.0 - q
    return cost


def enumerate_behavioral_cost(policy: BehavioralPolicy, inst: SkiInstance, p: float) -> float:
    T = inst.horizon
    if T > MAX_ENUM_T:
        raise ValueError(f"T={T} exceeds the enumeration limit {MAX_ENUM_T}")
    seqs = all_sequences(T)
    probs = sequence_probs(T, p)
    return float(sum(pr * _behavioral_sequence_cost(policy, s)
                     for s, pr in zip(seqs, probs) if pr > 0))


def bayes_optimum_dp(inst: SkiInstance, p: float) -> float:
    """Optimal expected cost with p known, over all policies (stopping on bad days allowed)."""
    B = inst.stop_cost
    after = 0.0
    for _ in range(inst.horizon):
        after = p * min(B, 1.0 + after) + (1.0 - p) * min(B, after)
    return after


def _free_states(T: int) -> list[tuple[int, int]]:
    return [(t, k) for t in range(1, T) for k in range(t)]


def all_policy_tables(T: int) -> np.ndarray:
    """Every valid deterministic table, shape (2^(T(T-1)/2), T+1, T+1)."""
    if T > MAX_BR_T:
        raise ValueError(f"T={T} exceeds the policy enumeration limit {MAX_BR_T}")
    states = _free_states(T)
    n = 2 ** len(states)
    tables = np.zeros((n, T + 1, T + 1), dtype=bool)
    codes = np.arange(n)
    for bit, (t, k) in enumerate(states):
        tables[:, t, k] = (codes >> bit) & 1
    return tables


def enumerate_best_response(prior: DiscretePrior,
                            inst: SkiInstance) -> tuple[InfoSymmetricPolicy, float]:
    """Exhaustive minimizer of E_prior[cost / Bayes-optimal cost]."""
    T = inst.horizon
    tables = all_policy_tables(T)
    seqs = all_sequences(T)
    costs = _table_costs(tables, seqs, inst.stop_cost)
    probs = np.stack([sequence_probs(T, p) for p in prior.support], axis=1)
    expected = costs @ probs
    opt = np.array([bayes_optimum_dp(inst, p) for p in prior.support])
    objective = (expected / opt) @ prior.weights
    best = int(np.argmin(objective))
    return InfoSymmetricPolicy(tables[best]), float(objective[best])


def _solve_lp(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row player minimizes the max column payoff; duals give the column mixture."""
    rows, cols = u.shape
    # variables: row weights x (rows), value v
    c = np.zeros(rows + 1)
    c[-1] = 1.0
    a_ub = np.hstack([u.T, -np.ones((cols, 1))])
    a_eq = np.zeros((1, rows + 1))
    a_eq[0, :rows] = 1.0
    bounds = [(0, None)] * rows + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(cols), A_eq=a_eq, b_eq=[1.0],
                  bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"minimax LP failed: {res.message}")
    return res.x[:rows], -res.ineqlin.marginals


def certified_minimax(table: PayoffTable) -> tuple[float, MixedStrategy, MixedStrategy]:
    rows, cols = _solve_lp(table.u)
    row_mix = MixedStrategy.normalized(rows)
    col_mix = MixedStrategy.normalized(cols)
    alg_gap, adv_gap = eps_nash_gap(row_mix, col_mix, table)
    if max(alg_gap, adv_gap) > CERT_TOL:
        raise RuntimeError(f"minimax certificate failed: gaps ({alg_gap:.3g}, {adv_gap:.3g})")
    value = float(row_mix.weights @ table.u @ col_mix.weights)
    return value, row_mix, col_mix


def reduced_table(inst: SkiInstance) -> np.ndarray:
    """Adversary utility of F^k (k good days, then bad) against threshold A^l."""
    T, B = inst.horizon, inst.stop_cost
    u = np.empty((T + 1, T))
    for level, k in itertools.product(range(T + 1), range(1, T + 1)):
        goods = np.r_[np.ones(k), np.zeros(T - k)]
        # simulate A^l: rent through l good days, stop on the next unless l = T
        cost = 0.0
        seen = 0
        for x in goods:
            if not x:
                continue
            if level < T and seen == level:
                cost += B
                break
            seen += 1
            cost += 1.0
        u[level, k - 1] = cost / min(k, B)
    return u


def brute_minimax_reduced(inst: SkiInstance) -> tuple[float, MixedStrategy, MixedStrategy]:
    """Certified value of the threshold-versus-prefix game (rows l=0..T, cols k=1..T)."""
    if inst.horizon > MAX_REDUCED_T:
        raise ValueError(f"T={inst.horizon} exceeds the limit {MAX_REDUCED_T}")
    return certified_minimax(PayoffTable.from_matrix(reduced_table(inst)))


def brute_minimax_dense(game: DenseGame) -> tuple[float, MixedStrategy, MixedStrategy]:
    rows, cols = game.payoff.shape
    if rows > MAX_DENSE or cols > MAX_DENSE:
        raise ValueError(f"table {rows}x{cols} exceeds {MAX_DENSE}x{MAX_DENSE}")
    return certified_minimax(game.payoff)


def dense_pi_game(inst: SkiInstance, grid) -> DenseGame:
    """All valid decision tables against a list of p values, utility cost / Bayes optimum."""
    T = inst.horizon
    tables = all_policy_tables(T)
    seqs = all_sequences(T)
    costs = _table_costs(tables, seqs, inst.stop_cost)
    grid = [float(p) for p in grid]
    probs = np.stack([sequence_probs(T, p) for p in grid], axis=1)
    opt = np.array([bayes_optimum_dp(inst, p) for p in grid])
    u = (costs @ probs) / opt
    labels = tuple(InfoSymmetricPolicy(tb).key() for tb in tables)
    return DenseGame(PayoffTable.from_matrix(u), labels, tuple(grid))
