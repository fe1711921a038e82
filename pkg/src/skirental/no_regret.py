"""Hedge for the maximizing adversary and the best-response learning loop.

Each round the adversary plays its Hedge mixture, the algorithm side answers
with a pure best response, and the adversary observes that response's full
utility vector. Averaging both sides gives an approximate equilibrium whose
quality is certified by the duality gap.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Callable, Hashable
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from skirental.game_core import MixedStrategy

# utilities this far outside [0, u_bar] are float noise, not errors
RANGE_SLACK = 1e-9


@dataclass(frozen=True)
class LearnerState:
    log_weights: np.ndarray
    step_size: float
    round: int
    cumulative_utility: np.ndarray
    u_bar: float

    @classmethod
    def uniform(cls, m: int, u_bar: float, step_size: float | None = None) -> LearnerState:
        if m < 1:
            raise ValueError("need at least one action")
        if u_bar <= 0:
            raise ValueError("u_bar must be positive")
        if step_size is None:
            step_size = anytime_step(m, 1, u_bar)
        return cls(np.zeros(m), step_size, 0, np.zeros(m), u_bar)

    @property
    def probabilities(self) -> np.ndarray:
        shifted = self.log_weights - self.log_weights.max()
        w = np.exp(shifted)
        return w / w.sum()

    def strategy(self) -> MixedStrategy:
        return MixedStrategy.normalized(self.probabilities)


def anytime_step(m: int, t: int, scale: float) -> float:
    """Step sqrt(8 ln m / t) / scale."""
    return math.sqrt(8.0 * math.log(m) / max(t, 1)) / scale


def _check_utilities(utilities, m: int, u_bar: float) -> np.ndarray:
    u = np.asarray(utilities, dtype=float)
    if u.shape != (m,):
        raise ValueError(f"expected {m} utilities, got shape {u.shape}")
    tol = RANGE_SLACK * max(1.0, u_bar)
    bad = ~(np.isfinite(u) & (u >= -tol) & (u <= u_bar + tol))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ValueError(f"utility {u[i]!r} of action {i} outside [0, {u_bar}]")
    return u


def hedge_update(state: LearnerState, utilities) -> LearnerState:
    """One multiplicative-weights step with the state's current step size."""
    u = _check_utilities(utilities, state.log_weights.size, state.u_bar)
    return replace(state,
                   log_weights=state.log_weights + state.step_size * u,
                   round=state.round + 1,
                   cumulative_utility=state.cumulative_utility + u)


@dataclass
class LearningOutcome:
    avg_adversary: MixedStrategy
    best_responses: list
    value_estimate: float
    gap_trace: list[float]
    rounds_used: int
    converged: bool
    final_gap: float
    # distinct best responses with merged uniform weights, in first-seen order
    mixture: list[tuple[Any, float]] = field(default_factory=list)
    # average utility vector of the algorithm's uniform mixture
    avg_utilities: np.ndarray | None = None


def run_br_loop(adv_actions: int,
                payoff_column: Callable[[Any, int], float] | None,
                best_response: Callable[[MixedStrategy], Any],
                eps: float,
                max_rounds: int,
                *,
                u_bar: float,
                payoff_vector: Callable[[Any], np.ndarray] | None = None,
                key: Callable[[Any], Hashable] = lambda a: a,
                adaptive_scale: bool = False,
                check_every: int = 1,
                check_growth: float = 0.0,
                trace_path: str | None = None) -> LearningOutcome:
    """Hedge against best responses until the duality gap of the averages is at most eps.

    ``payoff_vector`` (optional) returns all adversary utilities of a pure
    algorithm at once; otherwise ``payoff_column`` is called per action.
    With ``adaptive_scale`` the step uses the largest utility spread seen in
    a single round instead of ``u_bar``; Hedge is shift invariant, so the
    regret bound holds with that spread in place of the full range.

    The gap is checked every ``check_every`` rounds, or every
    ``check_growth * t`` rounds once that is larger; each check costs one
    extra best response.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if adv_actions < 1:
        raise ValueError("need at least one adversary action")
    if max_rounds < 1:
        raise ValueError("max_rounds must be positive")
    if payoff_vector is None:
        if payoff_column is None:
            raise ValueError("need payoff_column or payoff_vector")

        def payoff_vector(alg):
            return np.array([payoff_column(alg, j) for j in range(adv_actions)])

    m = adv_actions
    cache: dict[Hashable, np.ndarray] = {}

    def utilities(alg):
        k = key(alg)
        if k not in cache:
            cache[k] = _check_utilities(payoff_vector(alg), m, u_bar)
        return cache[k]

    state = LearnerState.uniform(m, u_bar)
    sum_adv = np.zeros(m)
    responses: list = []
    counts: dict[Hashable, int] = {}
    firsts: dict[Hashable, Any] = {}
    gap_trace: list[float] = []
    spread = 0.0
    gap = math.inf
    converged = False
    next_check = check_every

    writer = None
    trace_file = open(trace_path, "w", newline="") if trace_path else None
    try:
        if trace_file:
            writer = csv.writer(trace_file)
            writer.writerow(["round", "gap", "value_estimate"])
        t = 0
        while t < max_rounds:
            t += 1
            probs = state.probabilities
            alg = best_response(MixedStrategy.normalized(probs))
            u = utilities(alg)
            k = key(alg)
            if k not in counts:
                counts[k] = 0
                firsts[k] = alg
            counts[k] += 1
            responses.append(alg)
            sum_adv += probs

            spread = max(spread, float(u.max() - u.min()))
            scale = spread if adaptive_scale and spread > 0 else u_bar
            state = hedge_update(replace(state, step_size=0.0), u)
            if m > 1:
                # anytime form: weights = step_t * cumulative utility
                step = anytime_step(m, t, scale)
                state = replace(state, step_size=step,
                                log_weights=step * state.cumulative_utility)

            if t >= next_check or t == max_rounds:
                next_check = t + max(check_every, int(t * check_growth))
                gap, value = _duality_gap(state.cumulative_utility / t, sum_adv / t,
                                          best_response, utilities)
                gap_trace.append(gap)
                if writer:
                    writer.writerow([t, repr(gap), repr(value)])
                if gap <= eps:
                    converged = True
                    break
    finally:
        if trace_file:
            trace_file.close()

    avg_adv = MixedStrategy.normalized(sum_adv / t)
    avg_u = state.cumulative_utility / t
    value = float(avg_u @ avg_adv.weights)
    mixture = [(firsts[k], c / t) for k, c in counts.items()]
    return LearningOutcome(avg_adv, responses, value, gap_trace, t, converged, gap,
                           mixture, avg_u)


def _duality_gap(avg_u: np.ndarray, avg_adv: np.ndarray, best_response, utilities):
    """Adversary deviation value minus the best-response value against the averaged adversary."""
    adv = MixedStrategy.normalized(avg_adv)
    upper = float(avg_u.max())
    lower = float(utilities(best_response(adv)) @ adv.weights)
    value = float(avg_u @ adv.weights)
    return max(upper - lower, 0.0), value
