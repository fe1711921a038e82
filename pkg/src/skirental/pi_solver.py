"""Approximate prior-independent optimum for i.i.d. ski rental.

The adversary picks a distribution over a finite grid of good-day
probabilities, the algorithm picks a distribution over deterministic
information-symmetric policies, and the payoff is expected cost divided by
the Bayesian optimum. Hedge against exact best responses solves the game.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from skirental.bayes import (
    InfoSymmetricPolicy,
    always_continue_policy,
    bayes_opt_costs,
    best_response,
    policy_costs,
    threshold_count_policy,
)
from skirental.game_core import MixedStrategy, PayoffTable, eps_nash_gap
from skirental.instance import SkiInstance
from skirental.no_regret import run_br_loop
from skirental.policies import DiscretePrior
from skirental.worstcase import ThresholdMixture

MAX_GRID_POINTS = 2_000_000
# relative slack for ties in the worst-prior search
ARGMAX_TOL = 1e-12


@dataclass(frozen=True)
class CoverGrid:
    """Probability grid; ``owner[i]`` is the index of the Bayes interval holding ``points[i]``.

    Interval 0 is closed ``[delta, b_0]``; interval i > 0 is ``(b_{i-1}, b_i]``
    with ``b_i = segment_bounds[i]``.
    """

    points: np.ndarray
    segment_bounds: np.ndarray
    bar_eps: float
    owner: np.ndarray
    delta: float

    def __len__(self):
        return self.points.size

    def interval_of(self, p: float) -> int:
        """Index of the Bayes interval containing p."""
        if p < self.delta or p > 1:
            raise ValueError(f"p={p} outside [{self.delta}, 1]")
        return int(np.searchsorted(self.segment_bounds, p, side="left"))


def bayes_breakpoints(inst: SkiInstance) -> np.ndarray:
    """Right endpoints of the Bayes intervals, ending with 1."""
    T, B = inst.horizon, inst.stop_cost
    if inst.trivial:
        return np.array([1.0])
    last = min(math.ceil(T - B), T - 1)
    bounds = [(B - 1.0) / (T - 1)]
    for k in range(1, last + 1):
        bounds.append(1.0 if k == T - 1 else min((B - 1.0) / (T - k - 1), 1.0))
    out = []
    for b in bounds:
        if not out or b > out[-1]:
            out.append(b)
    return np.array(out)


def theoretical_pitch(inst: SkiInstance, eps: float) -> float:
    T, B = inst.horizon, inst.stop_cost
    return eps / (8.0 * (B + 1.0) ** 2 * (T + 1.0) ** 2 * T)


def build_cover(inst: SkiInstance, eps: float, pitch_override: float | None = None,
                max_points: int = MAX_GRID_POINTS) -> CoverGrid:
    """Grid every Bayes interval at the chosen pitch, endpoints included."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    delta = inst.prior_floor
    if delta >= 1:
        raise ValueError("prior floor must be below 1")
    if pitch_override is not None and not pitch_override > 0:
        raise ValueError("pitch must be positive")
    pitch = pitch_override if pitch_override is not None else theoretical_pitch(inst, eps)
    bounds = bayes_breakpoints(inst)

    points, owner = [], []
    left = delta
    for i, right in enumerate(bounds):
        if right < delta:
            continue
        lo = max(left, delta)
        n = max(1, math.ceil((right - lo) / pitch - 1e-9))
        if sum(len(p) for p in points) + n + 1 > max_points:
            raise ValueError(f"cover would exceed {max_points} points; use a coarser pitch")
        seg = np.linspace(lo, right, n + 1)
        if points:
            seg = seg[1:]  # left endpoint belongs to the previous interval
        points.append(seg)
        owner.append(np.full(seg.size, i))
        left = right
    pts = np.concatenate(points)
    pts[-1] = 1.0
    return CoverGrid(pts, bounds, pitch, np.concatenate(owner), delta)


@dataclass
class PiSolution:
    instance: SkiInstance
    algorithm_mixture: list[tuple[InfoSymmetricPolicy, float]]
    adversary_mixture: MixedStrategy
    grid: CoverGrid
    value: float
    certified_gap: float
    rounds: int
    gap_trace: list[float]
    converged: bool
    eps: float
    trace_csv_path: str | None = None
    upper_bound: float = field(default=math.nan)
    lower_bound: float = field(default=math.nan)

    def realized_table(self) -> PayoffTable:
        """Utilities of the mixture's policies (rows) at every grid point (columns)."""
        u = np.array([pi_utility_vector(pol, self.instance, self.grid)
                      for pol, _ in self.algorithm_mixture])
        return PayoffTable(u, (self.instance.B + 1) * (self.instance.T + 1))

    def realized_gap(self) -> tuple[float, float]:
        alg = MixedStrategy.normalized([w for _, w in self.algorithm_mixture])
        return eps_nash_gap(alg, self.adversary_mixture, self.realized_table())

    def to_dict(self) -> dict:
        inst = self.instance
        out = {
            "instance": {"T": inst.T, "B": inst.B, "delta": inst.prior_floor},
            "value": self.value,
            "certified_gap": self.certified_gap,
            "converged": self.converged,
            "rounds": self.rounds,
            "eps": self.eps,
            "pitch": self.grid.bar_eps,
            "adversary": [[float(p), float(w)]
                          for p, w in zip(self.grid.points, self.adversary_mixture.weights)
                          if w > 0],
            "policies": [{"weight": w, "policy": pol.to_dict()}
                         for pol, w in self.algorithm_mixture],
        }
        if self.trace_csv_path:
            out["trace_csv_path"] = self.trace_csv_path
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def pi_utility_vector(policy: InfoSymmetricPolicy, inst: SkiInstance, grid: CoverGrid,
                      opt: np.ndarray | None = None) -> np.ndarray:
    if opt is None:
        opt = bayes_opt_costs(inst, grid.points)
    return policy_costs(policy, inst, grid.points) / opt


def solve_pi(inst: SkiInstance, eps: float, pitch_override: float | None = None,
             max_rounds: int = 200_000, trace_path: str | None = None,
             check_every: int = 1, check_growth: float = 0.01) -> PiSolution:
    """Certified eps-approximate prior-independent optimum over the cover grid.

    The loop stops once the duality gap of the averaged strategies is at most
    eps / 4. If ``max_rounds`` binds first, the solution is returned with
    ``converged = False`` and the gap it did reach.
    """
    grid = build_cover(inst, eps, pitch_override)
    T, B = inst.horizon, inst.stop_cost
    u_bar = (B + 1.0) * (T + 1.0)
    if inst.trivial:
        # stopping never helps: always-continue attains ratio 1 at every p
        pol = always_continue_policy(T)
        adv = MixedStrategy.point(len(grid), len(grid) - 1)
        return PiSolution(inst, [(pol, 1.0)], adv, grid, 1.0, 0.0, 0, [0.0], True, eps,
                          upper_bound=1.0, lower_bound=1.0)

    opt = bayes_opt_costs(inst, grid.points)

    def respond(adv: MixedStrategy) -> InfoSymmetricPolicy:
        keep = adv.weights > 0
        prior = DiscretePrior.from_mixture(grid.points[keep], adv.weights[keep])
        return best_response(prior, inst, opt=opt[keep])

    outcome = run_br_loop(
        len(grid), None, respond, eps / 4.0, max_rounds,
        u_bar=u_bar,
        payoff_vector=lambda pol: pi_utility_vector(pol, inst, grid, opt),
        key=lambda pol: pol.key(),
        adaptive_scale=True,
        check_every=check_every,
        check_growth=check_growth,
        trace_path=trace_path,
    )
    value = outcome.value_estimate
    upper = float(outcome.avg_utilities.max())
    return PiSolution(inst, outcome.mixture, outcome.avg_adversary, grid, value,
                      outcome.final_gap, outcome.rounds_used, outcome.gap_trace,
                      outcome.converged, eps, trace_path,
                      upper_bound=upper, lower_bound=upper - outcome.final_gap)


def evaluate_against_worst_prior(policies, grid: CoverGrid,
                                 inst: SkiInstance) -> tuple[float, float]:
    """Grid point maximizing the mixture's expected cost over the Bayesian optimum."""
    if len(grid) == 0:
        raise ValueError("empty grid")
    policies = list(policies)
    if not policies:
        raise ValueError("empty policy mixture")
    opt = bayes_opt_costs(inst, grid.points)
    total = np.zeros(len(grid))
    for pol, w in policies:
        total += w * policy_costs(pol, inst, grid.points)
    return worst_grid_point(total / opt, grid.points)


def worst_grid_point(ratios: np.ndarray, points: np.ndarray) -> tuple[float, float]:
    """Largest ratio; among values equal up to float noise, the largest p."""
    top = float(ratios.max())
    i = int(np.flatnonzero(ratios >= top - ARGMAX_TOL * max(1.0, abs(top)))[-1])
    return float(points[i]), float(ratios[i])


def threshold_mixture_policies(mix: ThresholdMixture) -> list[tuple[InfoSymmetricPolicy, float]]:
    """Threshold mixture as weighted decision tables (last day always continues)."""
    return [(threshold_count_policy(level, mix.horizon), w)
            for level, w in zip(mix.support, mix.probs)]
