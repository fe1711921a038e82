"""Closed-form worst-case analysis of the finite-horizon ski-rental game.

The reduced game restricts the adversary to inputs ``F^k`` (k good days
followed by bad days) and the algorithm to thresholds ``A^l`` (continue
through the first l good days, stop on the next one; ``A^T`` never stops).
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from skirental.instance import SkiInstance, hindsight_cost


def _ipow(x: float, n: int) -> float:
    # integer exponents by repeated multiplication
    if n < 0:
        return 1.0 / _ipow(x, -n)
    out = 1.0
    for _ in range(n):
        out *= x
    return out


@dataclass(frozen=True)
class ThresholdMixture:
    """Probability vector over threshold algorithms A^l."""

    support: tuple[int, ...]
    probs: tuple[float, ...]
    value: float
    horizon: int

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise ValueError("support and probs differ in length")
        if any(p < 0 for p in self.probs):
            raise ValueError("negative threshold probability")
        if abs(sum(self.probs) - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {sum(self.probs)}, not 1")
        if any(not 0 <= level <= self.horizon for level in self.support):
            raise ValueError("threshold outside 0..T")

    def dense(self) -> np.ndarray:
        """Probabilities indexed by l = 0..T."""
        out = np.zeros(self.horizon + 1)
        for level, p in zip(self.support, self.probs):
            out[level] += p
        return out

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.support, self.probs))


@dataclass(frozen=True)
class StopSchedule:
    """Conditional stop probabilities by good-day count k = 1..T (``probs[k-1]``)."""

    probs: np.ndarray
    effective_horizon: int

    def __getitem__(self, k: int) -> float:
        if not 1 <= k <= len(self.probs):
            return 0.0
        return float(self.probs[k - 1])

    def to_mixture(self, stop_cost: float) -> ThresholdMixture:
        """Joint threshold probabilities: stop at count level+1 after continuing at every lower count."""
        T = self.effective_horizon
        survive = 1.0
        support, probs = [], []
        for level in range(T):
            q = survive * self[level + 1]
            if q > 0:
                support.append(level)
                probs.append(q)
            survive *= 1.0 - self[level + 1]
        if survive > 0:
            support.append(T)
            probs.append(survive)
        inst = SkiInstance(T, stop_cost)
        mix = ThresholdMixture(tuple(support), tuple(probs), 0.0, T)
        value = max(expected_reduced_payoffs(mix, inst))
        return ThresholdMixture(mix.support, mix.probs, value, T)


def reduced_payoff(level: int, k: int, inst: SkiInstance) -> float:
    """Adversary utility u(A^l, F^k) in the reduced game."""
    T, B = inst.horizon, inst.stop_cost
    if not 0 <= level <= T:
        raise ValueError(f"threshold level={level} outside 0..{T}")
    if not 1 <= k <= T:
        raise ValueError(f"good-day count k={k} outside 1..{T}")
    denom = min(k, B)
    if k > level:
        return (level + B) / denom
    return k / denom


def reduced_payoff_table(inst: SkiInstance) -> np.ndarray:
    """Rows l = 0..T, columns k = 1..T."""
    T = inst.horizon
    return np.array([[reduced_payoff(level, k, inst) for k in range(1, T + 1)]
                     for level in range(T + 1)])


def adversary_support(inst: SkiInstance) -> tuple[int, ...]:
    """Good-day counts the adversary mixes over at equilibrium."""
    T = inst.horizon
    if inst.trivial:
        return tuple(range(1, T + 1))
    if inst.short_horizon:
        return tuple(range(1, T - inst.floor_B + 1)) + (T,)
    return tuple(range(1, inst.ceil_B)) + (T,)


def worst_case_mixture(inst: SkiInstance) -> ThresholdMixture:
    """Minimax-optimal randomization over threshold algorithms."""
    T, B = inst.horizon, inst.stop_cost
    fl, cl = inst.floor_B, inst.ceil_B
    if inst.trivial:
        return ThresholdMixture((T,), (1.0,), 1.0, T)
    growth = B / (B - 1.0)
    if inst.short_horizon:
        top = T - fl - 1
        base_prob = 1.0 / (B * fl / (T - B) * _ipow(growth, top) - (B - 1.0))
        support = list(range(top + 1)) + [T]
        probs = [_ipow(growth, level) * base_prob for level in range(top + 1)]
        probs.append(B / (T - B) * _ipow(growth, top) * (B + fl - T) * base_prob)
    else:
        base_prob = 1.0 / ((B - 1.0) * (_ipow(growth, cl - 1) * B / (cl - 1) - 1.0))
        support = list(range(cl))
        probs = [_ipow(growth, level) * base_prob for level in range(cl - 1)]
        probs.append(_ipow(growth, cl - 2) * (B + 1 - cl) * B / (cl - 1) * base_prob)
    return ThresholdMixture(tuple(support), tuple(probs), competitive_ratio(inst), T)


def competitive_ratio(inst: SkiInstance) -> float:
    """Value of the worst-case game (optimal randomized competitive ratio)."""
    T, B = inst.horizon, inst.stop_cost
    fl, cl = inst.floor_B, inst.ceil_B
    if inst.trivial:
        return 1.0
    growth = B / (B - 1.0)
    if inst.short_horizon:
        return 1.0 / (1.0 - (T - B) * (B - 1.0) / (B * fl * _ipow(growth, T - fl - 1)))
    return 1.0 / (1.0 - (cl - 1) / B * _ipow(1.0 / growth, cl - 1))


def conditional_stop_probs(inst: SkiInstance) -> StopSchedule:
    """Probability of stopping on the k-th good day given survival so far."""
    T, B = inst.horizon, inst.stop_cost
    fl, cl = inst.floor_B, inst.ceil_B
    probs = np.zeros(T)
    if inst.trivial:
        return StopSchedule(probs, T)
    growth = B / (B - 1.0)
    if inst.short_horizon:
        for k in range(1, T - fl + 1):
            probs[k - 1] = 1.0 / (B * fl / (T - B) * _ipow(growth, T - fl - k) - (B - 1.0))
    else:
        for k in range(1, cl):
            probs[k - 1] = 1.0 / ((B - 1.0) * _ipow(growth, cl - k) * B / (cl - 1) - (B - 1.0))
        probs[cl - 1] = 1.0
    return StopSchedule(probs, T)


def expected_reduced_payoffs(mix: ThresholdMixture, inst: SkiInstance) -> np.ndarray:
    """Adversary payoff of each F^k (k = 1..T) against the mixture."""
    return mix.dense() @ reduced_payoff_table(inst)


def threshold_cost(level: int, sequence: Sequence[int], stop_cost: float) -> float:
    """Cost of A^l on a fixed weather sequence."""
    T = len(sequence)
    goods = 0
    cost = 0.0
    for x in sequence:
        if not x:
            continue
        if level < T and goods == level:
            return cost + stop_cost
        goods += 1
        cost += 1.0
    return cost


def _check_sequence(sequence: Sequence[int], T: int) -> list[int]:
    seq = [int(x) for x in sequence]
    if len(seq) != T:
        raise ValueError(f"sequence has length {len(seq)}, expected {T}")
    if any(x not in (0, 1) for x in seq):
        raise ValueError("sequence entries must be 0 or 1")
    return seq


def wc_cost_on_sequence(mix: ThresholdMixture, sequence: Sequence[int],
                        inst: SkiInstance) -> float:
    """Expected cost of a threshold mixture on a fixed sequence."""
    seq = _check_sequence(sequence, inst.horizon)
    return sum(p * threshold_cost(level, seq, inst.stop_cost)
               for level, p in zip(mix.support, mix.probs))


def worst_case_ratio_on_sequence(cost: float, sequence: Sequence[int], stop_cost: float) -> float:
    """cost / min{#good, B}; 1 on the all-bad sequence (0/0)."""
    opt = hindsight_cost(sum(sequence), stop_cost)
    if opt == 0:
        return 1.0
    return cost / opt
